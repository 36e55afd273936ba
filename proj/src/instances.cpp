#include "swmsim/instances.hpp"

#include <string>

namespace swmsim {

Count staircase_h(Count B, Count a) {
  // a*w + w(w+1)/2 <= B; start from the real root and correct.
  double ad = static_cast<double>(a) + 0.5;
  Count w = static_cast<Count>(std::floor(-ad + std::sqrt(ad * ad + 2.0 * static_cast<double>(B))));
  w = std::max<Count>(w, 0);
  auto fits = [&](Count x) {
    return x >= 0 && static_cast<__int128>(a) * x + static_cast<__int128>(x) * (x + 1) / 2 <= B;
  };
  while (w > 0 && !fits(w)) --w;
  while (fits(w + 1)) ++w;
  return w;
}

Count staircase_p(Count B, Count a) { return staircase_h(B - a, 0); }

StaircaseParams StaircaseParams::with_default_horizon(Count B, Count a, bool exact) {
  StaircaseParams p{B, a, 0, exact};
  Count h = p.h();
  p.horizon = 5 * (a + h);
  return p;
}

StaircaseParams StaircaseParams::from_c(Count B, double C, bool exact) {
  if (!(C > 0)) throw InputError("C must be positive");
  Count a = static_cast<Count>(std::llround(C * std::sqrt(static_cast<double>(B))));
  return with_default_horizon(B, a, exact);
}

StaircaseParams StaircaseParams::exact_near(Count B, double C) {
  if (!(C > 0)) throw InputError("C must be positive");
  if (B < 2) throw InputError("buffer size too small for a staircase");
  // With a = C*sqrt(B), a*h + h^2/2 = B gives h = (sqrt(C^2 + 2) - C) * sqrt(B).
  const double root = std::sqrt(static_cast<double>(B));
  Count h = std::max<Count>(1, std::llround((std::sqrt(C * C + 2) - C) * root));
  Count a = std::max<Count>(1, std::llround(C * root));
  return with_default_horizon(staircase_exact_buffer(a, h), a, true);
}

void StaircaseParams::validate() const {
  if (a < 1) throw InputError("staircase needs a >= 1");
  if (B < a + 1) throw InputError("staircase needs B >= a + 1");
  if (horizon < 0) throw InputError("horizon must be non-negative");
  if (exact) {
    Count hh = h();
    if (staircase_exact_buffer(a, hh) != B)
      throw InputError("B=" + std::to_string(B) + " is not a*h + h(h+1)/2 for a=" + std::to_string(a) +
                       ", h=" + std::to_string(hh));
  }
}

QueueTimeline staircase_instance(const StaircaseParams& params) {
  params.validate();
  const Count B = params.B, a = params.a, h = params.h();
  if (h < 1) throw InputError("staircase needs h >= 1");
  QueueTimeline timeline;
  for (QueueId j = 1; j < h; ++j) timeline.add(QueueLife{j, 1, 0, j});
  for (QueueId j = h; j <= h + params.horizon + a; ++j) {
    QueueLife life{j, 1, 0, j <= h + a ? B : 0};
    if (j > h) {
      life.begin = std::max<Slot>(1, j - h - a);
      life.end = std::min<Slot>(j - h, params.horizon);
    }
    if (life.has_interval() || life.initial_load > 0) timeline.add(life);
  }
  return timeline;
}

QueueTimeline phi_k_instance(const PhiKParams& params) {
  if (params.k < 2) throw InputError("phi-k needs k >= 2");
  if (params.cycles < 1) throw InputError("phi-k needs at least one cycle");
  if (params.B < 1) throw InputError("buffer size B must be at least 1");
  QueueTimeline timeline;
  const std::int64_t k = params.k;
  for (QueueId j = 1; j <= k * params.cycles; ++j)
    timeline.add(QueueLife{j, k * ((j - 1) / k) + 1, j, 0});
  return timeline;
}

}  // namespace swmsim
