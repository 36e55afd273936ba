#pragma once

#include <functional>
#include <optional>

#include "swmsim/model.hpp"
#include "swmsim/water_fill.hpp"

namespace swmsim {

enum class TimelinePolicy { Lqd, LateQdAggregate, StaircaseOffline };

struct TimelineRunOptions {
  RemainderOrder order = RemainderOrder::LowestIdFirst;
  bool record_slots = true;
  bool record_dead_transmissions = true;
  // Packets the staircase offline policy accepts from a dying queue; derived
  // from the receiver count on slot 1 when absent.
  std::optional<Count> accept;
  // Called once per queue when it stops receiving: (queue, slot, packets held).
  std::function<void(QueueId, Slot, Count)> on_death;
};

// Count-level simulation of a timeline-form instance with unbounded queue ids.
// Every receiving queue holds at least B virtual packets, so receivers form one
// class and only dead queues need individual values; those are kept grouped by
// the slot on which they run empty. Produces the same totals and slot rows as
// simulate() with the matching policy, without occupancy snapshots.
SimulationResult run_timeline(const QueueTimeline& timeline, Count buffer_size, TimelinePolicy policy,
                              const TimelineRunOptions& options = {});

}  // namespace swmsim
