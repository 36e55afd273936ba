#include "swmsim/water_fill.hpp"

#include <algorithm>
#include <vector>

namespace swmsim {

BufferState water_fill(const BufferState& virtual_state, Count budget, RemainderOrder order) {
  if (budget < 0) throw ContractError("negative water-fill budget");
  if (virtual_state.total() <= budget) return virtual_state;

  Count hi = 0;
  for (const auto& [q, v] : virtual_state) hi = std::max(hi, v);
  auto filled = [&](Count level) {
    Count s = 0;
    for (const auto& [q, v] : virtual_state) s += std::min(v, level);
    return s;
  };
  // Largest level with filled(level) <= budget; filled(hi) > budget here.
  Count lo = 0;
  while (hi - lo > 1) {
    Count mid = lo + (hi - lo) / 2;
    if (filled(mid) <= budget)
      lo = mid;
    else
      hi = mid;
  }
  const Count level = lo;
  Count remainder = budget - filled(level);

  std::vector<BufferState::Entry> out(virtual_state.begin(), virtual_state.end());
  for (auto& [q, v] : out) v = std::min(v, level);
  auto grant = [&](auto first, auto last) {
    for (auto it = first; it != last && remainder > 0; ++it) {
      if (virtual_state.get(it->first) > level) {
        ++it->second;
        --remainder;
      }
    }
  };
  if (order == RemainderOrder::LowestIdFirst)
    grant(out.begin(), out.end());
  else
    grant(out.rbegin(), out.rend());
  return BufferState::from_sorted(std::move(out));
}

FractionalBufferState water_fill(const FractionalBufferState& virtual_state, Count budget) {
  if (budget < 0) throw ContractError("negative water-fill budget");
  const Rational cap(static_cast<long>(budget));
  Rational total = virtual_state.total();
  if (total <= cap) return virtual_state;

  std::vector<Rational> sorted;
  sorted.reserve(virtual_state.nonempty());
  for (const auto& [q, v] : virtual_state) sorted.push_back(v);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());

  // The top m queues are clipped to the level; the rest keep everything.
  Rational prefix(0), level(0);
  for (std::size_t m = 1; m <= sorted.size(); ++m) {
    prefix += sorted[m - 1];
    Rational rest = total - prefix;
    Rational next = m < sorted.size() ? sorted[m] : Rational(0);
    if (cap - rest >= next * static_cast<long>(m)) {
      level = (cap - rest) / static_cast<long>(m);
      level.canonicalize();
      break;
    }
  }
  std::vector<FractionalBufferState::Entry> out;
  out.reserve(virtual_state.nonempty());
  for (const auto& [q, v] : virtual_state) out.emplace_back(q, v < level ? v : level);
  return FractionalBufferState::from_sorted(std::move(out));
}

}  // namespace swmsim
