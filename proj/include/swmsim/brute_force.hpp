#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "swmsim/policy.hpp"

namespace swmsim {

struct BruteForceLimits {
  Count max_packets = 24;
  std::int64_t max_queues = 5;
  Slot max_horizon = 8;
};

// Exhaustive search over regular strategies: on every overflow, each way of
// keeping exactly B packets out of the virtual buffer is tried.
class BruteForceSolver {
 public:
  BruteForceSolver(const ArrivalSchedule& schedule, Count buffer_size, BruteForceLimits limits = {});

  // Maximum number of packets transmitted, drain included.
  Count optimum();
  // An optimal post-admission state at slot t given the buffer at its start.
  BufferState best_admission(Slot t, const BufferState& buffer);

 private:
  using Occupancy = std::vector<Count>;

  Count value(Slot t, const Occupancy& start);
  std::vector<Occupancy> choices(Slot t, const Occupancy& start) const;
  Count step_value(Slot t, const Occupancy& kept);

  ArrivalSchedule schedule_;
  Count buffer_size_;
  std::vector<QueueId> queues_;
  std::map<std::pair<Slot, Occupancy>, Count> memo_;
};

Count brute_force_opt(const ArrivalSchedule& schedule, Count buffer_size, BruteForceLimits limits = {});

class BruteForcePolicy : public PushOutPolicy {
 public:
  explicit BruteForcePolicy(BruteForceLimits limits = {}) : limits_(limits) {}
  std::string name() const override { return "brute-force"; }
  bool clairvoyant() const override { return true; }
  void prepare(const ArrivalSchedule& schedule) override;
  BufferState admit(const SlotView& view) override;

 private:
  BruteForceLimits limits_;
  std::optional<ArrivalSchedule> schedule_;
  std::optional<BruteForceSolver> solver_;
};

}  // namespace swmsim
