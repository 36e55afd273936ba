#include "swmsim/brute_force.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace swmsim {

BruteForceSolver::BruteForceSolver(const ArrivalSchedule& schedule, Count buffer_size,
                                   BruteForceLimits limits)
    : schedule_(schedule), buffer_size_(buffer_size), queues_(schedule.queues()) {
  if (buffer_size < 1) throw InputError("buffer size B must be at least 1");
  if (schedule.total() > limits.max_packets)
    throw InputError("brute force limited to " + std::to_string(limits.max_packets) + " packets, instance has " +
                     std::to_string(schedule.total()));
  if (static_cast<std::int64_t>(queues_.size()) > limits.max_queues)
    throw InputError("brute force limited to " + std::to_string(limits.max_queues) + " queues");
  if (schedule.horizon() > limits.max_horizon)
    throw InputError("brute force limited to horizon " + std::to_string(limits.max_horizon));
}

Count BruteForceSolver::optimum() { return value(0, Occupancy(queues_.size(), 0)); }

std::vector<BruteForceSolver::Occupancy> BruteForceSolver::choices(Slot t, const Occupancy& start) const {
  Occupancy v = start;
  for (const Arrival& a : schedule_.at(t)) {
    auto it = std::lower_bound(queues_.begin(), queues_.end(), a.queue);
    v[static_cast<std::size_t>(it - queues_.begin())] += a.count;
  }
  Count total = std::accumulate(v.begin(), v.end(), Count{0});
  if (total <= buffer_size_) return {v};

  std::vector<Occupancy> out;
  Occupancy o(v.size(), 0);
  // suffix[i]: most that queues i.. can still take.
  std::vector<Count> suffix(v.size() + 1, 0);
  for (std::size_t i = v.size(); i-- > 0;) suffix[i] = suffix[i + 1] + v[i];
  auto rec = [&](auto&& self, std::size_t i, Count left) -> void {
    if (i == v.size()) {
      if (left == 0) out.push_back(o);
      return;
    }
    Count lo = std::max<Count>(0, left - suffix[i + 1]);
    Count hi = std::min(v[i], left);
    for (Count x = lo; x <= hi; ++x) {
      o[i] = x;
      self(self, i + 1, left - x);
    }
    o[i] = 0;
  };
  rec(rec, 0, buffer_size_);
  return out;
}

Count BruteForceSolver::step_value(Slot t, const Occupancy& kept) {
  Count sent = 0;
  Occupancy next = kept;
  for (auto& x : next)
    if (x > 0) {
      ++sent;
      --x;
    }
  return sent + value(t + 1, next);
}

Count BruteForceSolver::value(Slot t, const Occupancy& start) {
  if (t > schedule_.horizon()) return std::accumulate(start.begin(), start.end(), Count{0});
  auto key = std::make_pair(t, start);
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  Count best = 0;
  for (const auto& kept : choices(t, start)) best = std::max(best, step_value(t, kept));
  memo_.emplace(std::move(key), best);
  return best;
}

BufferState BruteForceSolver::best_admission(Slot t, const BufferState& buffer) {
  Occupancy start(queues_.size(), 0);
  for (const auto& [q, v] : buffer) {
    auto it = std::lower_bound(queues_.begin(), queues_.end(), q);
    if (it == queues_.end() || *it != q) throw ContractError("buffer holds a queue absent from the schedule");
    start[static_cast<std::size_t>(it - queues_.begin())] = v;
  }
  const Occupancy* best = nullptr;
  Count best_value = -1;
  auto options = choices(t, start);
  for (const auto& kept : options) {
    Count v = step_value(t, kept);
    if (v > best_value) {
      best_value = v;
      best = &kept;
    }
  }
  std::vector<BufferState::Entry> entries;
  for (std::size_t i = 0; i < queues_.size(); ++i) entries.emplace_back(queues_[i], (*best)[i]);
  return BufferState::from_sorted(std::move(entries));
}

Count brute_force_opt(const ArrivalSchedule& schedule, Count buffer_size, BruteForceLimits limits) {
  BruteForceSolver solver(schedule, buffer_size, limits);
  return solver.optimum();
}

void BruteForcePolicy::prepare(const ArrivalSchedule& schedule) {
  schedule_.emplace(schedule);
  solver_.reset();
}

BufferState BruteForcePolicy::admit(const SlotView& view) {
  if (!schedule_) throw ContractError("brute-force policy used without the schedule");
  if (!solver_) solver_.emplace(*schedule_, view.buffer_size, limits_);
  return solver_->best_admission(view.slot, view.buffer);
}

}  // namespace swmsim
