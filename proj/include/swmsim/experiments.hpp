#pragma once

#include <vector>

#include "swmsim/instances.hpp"
#include "swmsim/timeline_engine.hpp"

namespace swmsim {

// Average transmissions per slot over slots [from, to).
double per_slot_rate(const SimulationResult& result, Slot from, Slot to);

struct StaircaseRates {
  StaircaseParams params;
  Count h = 0;
  Count p = 0;
  double lqd_rate = 0;      // measured, per slot
  double offline_rate = 0;  // measured, per slot
  double ratio = 0;         // offline_rate / lqd_rate
  double formula = 0;       // (a + p) / (a + h)
  double limit = 0;         // (C + sqrt 2) / sqrt(C^2 + 2) with C = a / sqrt(B)
};

// Runs LQD and the staircase offline policy on the staircase instance and
// measures both after a warm-up of a+h slots.
StaircaseRates staircase_rates(const StaircaseParams& params,
                               RemainderOrder order = RemainderOrder::LowestIdFirst);

struct PhiKComparison {
  std::int64_t k = 0;
  Count B = 0;
  std::int64_t cycles = 0;
  std::int64_t warmup_cycles = 0;
  std::int64_t tail_cycles = 0;
  Count lqd_total = 0;
  Count lateqd_total = 0;
  // Per-slot rates over the cycles between warm-up and tail. The last cycle
  // is special for the clairvoyant policy, which knows that nothing follows.
  double lqd_steady = 0;
  double lateqd_steady = 0;
  double ratio_total() const { return static_cast<double>(lateqd_total) / static_cast<double>(lqd_total); }
  double ratio_steady() const { return lateqd_steady / lqd_steady; }
};

PhiKComparison compare_on_phi_k(std::int64_t k, Count B, std::int64_t cycles, std::int64_t warmup_cycles,
                                std::int64_t tail_cycles = 1,
                                RemainderOrder order = RemainderOrder::LowestIdFirst);

struct DeadTraceRow {
  QueueId queue = 0;
  Slot dying_slot = 0;
  Count lqd_accepted = 0;
  // Packets LQD sends from the queue from its dying slot on.
  Count lqd_sent_after = 0;
  Count lateqd_accepted = 0;
};

std::vector<DeadTraceRow> phi_k_dead_trace(std::int64_t k, Count B, std::int64_t cycles);

}  // namespace swmsim
