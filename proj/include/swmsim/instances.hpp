#pragma once

#include <cmath>
#include <optional>

#include "swmsim/engine.hpp"

namespace swmsim {

// Largest w with a*w + w(w+1)/2 <= B.
Count staircase_h(Count B, Count a);
// Largest w with w(w+1)/2 <= B - a.
Count staircase_p(Count B, Count a);

struct StaircaseParams {
  Count B = 0;
  Count a = 0;
  Slot horizon = 0;
  // Require B = a*h + h(h+1)/2 with no rounding.
  bool exact = false;

  Count h() const { return staircase_h(B, a); }
  Count p() const { return staircase_p(B, a); }
  // Horizon defaults to warm-up (a+h) plus 4(a+h) measured slots.
  static StaircaseParams with_default_horizon(Count B, Count a, bool exact = false);
  // a = round(C * sqrt(B)).
  static StaircaseParams from_c(Count B, double C, bool exact = false);
  // Exact-mode parameters whose buffer is close to B and whose a/sqrt(B) is close to C.
  static StaircaseParams exact_near(Count B, double C);
  void validate() const;
};

// The buffer size for which a and h fit with no rounding.
inline Count staircase_exact_buffer(Count a, Count h) { return a * h + h * (h + 1) / 2; }

// Queues 1..h-1 start with j packets, h..h+a start with B. Queue j > h then
// receives B packets per slot on [max(1, j-h-a), j-h], so Q_{t+h} dies on slot t
// and exactly a+1 queues receive on every slot.
QueueTimeline staircase_instance(const StaircaseParams& params);

struct PhiKParams {
  std::int64_t k = 2;
  Count B = 1;
  std::int64_t cycles = 1;
};

// Queue j receives on [k*floor((j-1)/k) + 1, j].
QueueTimeline phi_k_instance(const PhiKParams& params);

template <typename Q>
struct AdversaryRun {
  BasicSimulationResult<Q> result;
  QueueTimeline timeline;
};

// Keeps a+1 receiving queues. After each arrival phase the receiver holding the
// fewest packets (lowest id on ties) stops receiving and a fresh queue takes
// its place. Slot-0 loads follow the staircase instance.
template <typename Q>
AdversaryRun<Q> adaptive_adversary_run(BasicPushOutPolicy<Q>& policy, Count B, Count a, Slot horizon,
                                       SimulationOptions options = {}) {
  if (policy.clairvoyant())
    throw ContractError("adaptive adversary needs an online policy; " + policy.name() + " reads the schedule");
  StaircaseParams params{B, a, horizon, false};
  params.validate();
  const Count h = params.h();

  struct Receiver {
    QueueId id;
    Slot born;  // 0 for the slot-0 loaded queues
  };
  QueueTimeline timeline;
  for (QueueId j = 1; j < h; ++j) timeline.add(QueueLife{j, 1, 0, j});
  std::vector<Receiver> receivers;
  for (QueueId j = h; j <= h + a; ++j) receivers.push_back({j, 0});
  QueueId next_id = h + a + 1;

  auto retire = [&](const Receiver& r, Slot last) {
    QueueLife life{r.id, 1, 0, 0};
    if (r.born == 0) {
      life.initial_load = B;
      if (last >= 1) {
        life.begin = 1;
        life.end = last;
      }
    } else {
      life.begin = r.born;
      life.end = last;
    }
    timeline.add(life);
  };

  BasicSwitch<Q> sw(SwitchConfig{B, std::nullopt}, policy, options);
  for (Slot t = 0; t <= horizon; ++t) {
    std::vector<Arrival> arrivals;
    if (t == 0)
      for (QueueId j = 1; j < h; ++j) arrivals.push_back({j, j});
    for (const auto& r : receivers) arrivals.push_back({r.id, B});
    std::sort(arrivals.begin(), arrivals.end(),
              [](const Arrival& x, const Arrival& y) { return x.queue < y.queue; });
    const auto& after = sw.arrive(arrivals);

    std::vector<QueueId> dying;
    const auto live_count = static_cast<std::int64_t>(t == horizon ? 0 : receivers.size() - 1);
    if (t == horizon) {
      for (const auto& r : receivers) {
        dying.push_back(r.id);
        retire(r, t);
      }
      receivers.clear();
    } else {
      auto victim = receivers.begin();
      for (auto it = receivers.begin(); it != receivers.end(); ++it) {
        Q x = after.get(it->id), best = after.get(victim->id);
        if (x < best || (x == best && it->id < victim->id)) victim = it;
      }
      dying.push_back(victim->id);
      retire(*victim, t);
      receivers.erase(victim);
      receivers.push_back({next_id++, t + 1});
    }
    if (t == 0)
      for (QueueId j = 1; j < h; ++j) dying.push_back(j);
    std::sort(dying.begin(), dying.end());
    sw.transmit(dying, live_count);
  }
  return {sw.finish(), std::move(timeline)};
}

}  // namespace swmsim
