#pragma once

#include <random>

#include "swmsim/engine.hpp"
#include "swmsim/instances.hpp"
#include "swmsim/policies.hpp"

namespace testing {

using namespace swmsim;

// Q1 on [1,2], Q2 on [2,4], Q3 on [3,6], B=6.
inline ArrivalSchedule three_queue_staircase() {
  QueueTimeline tl;
  tl.add({1, 1, 2, 0});
  tl.add({2, 2, 4, 0});
  tl.add({3, 3, 6, 0});
  return expand(tl, SwitchConfig{6, 3}, 6);
}

// Four packets to Q1 on slot 1, four each to Q1 and Q2 on slot 2, four each to
// Q2 and Q3 on slot 3; B=4.
inline ArrivalSchedule lifo_example() {
  ArrivalSchedule s(4);
  s.add(1, 1, 4);
  s.add(2, 1, 4);
  s.add(2, 2, 4);
  s.add(3, 2, 4);
  s.add(3, 3, 4);
  return s;
}

inline SimulationResult run(const ArrivalSchedule& s, PushOutPolicy& p, Count B, bool snapshots = false) {
  SimulationOptions opt;
  opt.record_occupancy = snapshots;
  return simulate(s, p, SwitchConfig{B, std::nullopt}, opt);
}

inline SimulationResult run(const ArrivalSchedule& s, const std::string& policy, Count B,
                            bool snapshots = false) {
  auto p = make_policy(policy);
  return run(s, *p, B, snapshots);
}

inline FractionalSimulationResult run_fractional(const ArrivalSchedule& s, Count B, bool snapshots = false) {
  FractionalLqdPolicy p;
  SimulationOptions opt;
  opt.record_occupancy = snapshots;
  return simulate(s, p, SwitchConfig{B, std::nullopt}, opt);
}

struct RandomShape {
  int max_queues = 4;
  Count max_buffer = 5;
  Slot max_horizon = 6;
  Count max_per_slot = 3;
  Count max_packets = 24;
};

// Random small arrival schedule within the brute-force limits.
inline ArrivalSchedule random_schedule(std::mt19937_64& rng, const RandomShape& shape, Count& B) {
  std::uniform_int_distribution<Count> bdist(1, shape.max_buffer);
  B = bdist(rng);
  std::uniform_int_distribution<int> qdist(1, shape.max_queues);
  std::uniform_int_distribution<Slot> tdist(1, shape.max_horizon);
  int n = qdist(rng);
  Slot T = tdist(rng);
  ArrivalSchedule s(B);
  Count total = 0;
  std::uniform_int_distribution<Count> cdist(0, std::min(shape.max_per_slot, B));
  std::bernoulli_distribution active(0.5);
  for (Slot t = 0; t <= T; ++t)
    for (QueueId q = 1; q <= n; ++q) {
      if (!active(rng)) continue;
      Count c = std::min(cdist(rng), shape.max_packets - total);
      if (c > 0) {
        s.add(t, q, c);
        total += c;
      }
    }
  return s;
}

// Random timeline-form instance: intervals with B packets per slot, optional loads.
inline QueueTimeline random_timeline(std::mt19937_64& rng, int queues, Count B, Slot horizon) {
  QueueTimeline tl;
  std::uniform_int_distribution<Slot> tdist(1, horizon);
  std::uniform_int_distribution<Count> load(0, B);
  std::bernoulli_distribution coin(0.6);
  for (QueueId q = 1; q <= queues; ++q) {
    QueueLife life{q, 1, 0, coin(rng) ? load(rng) : 0};
    if (coin(rng)) {
      Slot x = tdist(rng), y = tdist(rng);
      life.begin = std::min(x, y);
      life.end = std::max(x, y);
    }
    if (life.has_interval() || life.initial_load > 0) tl.add(life);
  }
  return tl;
}

}  // namespace testing
