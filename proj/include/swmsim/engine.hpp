#pragma once

#include <set>
#include <span>
#include <string>
#include <vector>

#include "swmsim/model.hpp"
#include "swmsim/policy.hpp"

namespace swmsim {

struct SimulationOptions {
  // Keep post-admission and post-transmission snapshots in every SlotTrace.
  bool record_occupancy = false;
  // Keep per-slot rows at all (totals are always kept).
  bool record_slots = true;
};

// Two-phase slotted switch driven one slot at a time. Slots start at 0 and
// are consecutive; after the last arrival, finish() drains the buffer.
template <typename Q>
class BasicSwitch {
 public:
  BasicSwitch(const SwitchConfig& config, BasicPushOutPolicy<Q>& policy,
              SimulationOptions options = {})
      : config_(config), policy_(policy), options_(options) {
    config_.validate();
  }

  Slot next_slot() const { return slot_; }
  const BasicBufferState<Q>& buffer() const { return buffer_; }
  bool in_arrival_phase() const { return admitted_; }

  // Arrival phase of the current slot; returns the post-admission buffer.
  const BasicBufferState<Q>& arrive(std::span<const Arrival> arrivals) {
    if (admitted_) throw ContractError("arrival phase called twice for slot " + std::to_string(slot_));
    for (const Arrival& a : arrivals) {
      if (a.count < 0 || a.count > config_.buffer_size)
        throw InputError("arrival count outside [0, B] for queue " + std::to_string(a.queue));
      if (config_.max_queues && (a.queue < 1 || a.queue > *config_.max_queues))
        throw InputError("queue id " + std::to_string(a.queue) + " outside 1..N");
      if (a.count > 0) dead_.erase(a.queue);
      result_.total_arrivals += quantity<Q>(a.count);
    }
    BasicBufferState<Q> virtual_state = merge_arrivals(buffer_, arrivals);
    BasicSlotView<Q> view{slot_, config_.buffer_size, buffer_, arrivals};
    BasicBufferState<Q> next = policy_.admit(view);
    check_admission(virtual_state, next);
    Q virtual_total = virtual_state.total();
    Q kept = next.total();
    row_ = BasicSlotTrace<Q>{};
    row_.slot = slot_;
    row_.total_occupancy = kept;
    row_.dropped = virtual_total - kept;
    result_.total_dropped += row_.dropped;
    buffer_ = std::move(next);
    admitted_ = true;
    return buffer_;
  }

  // Transmission phase. `dying` are the queues whose arrivals end on this slot;
  // live_count is the number of queues that keep receiving afterwards.
  void transmit(std::span<const QueueId> dying, std::int64_t live_count) {
    if (!admitted_) throw ContractError("transmission before arrival phase at slot " + std::to_string(slot_));
    if (options_.record_occupancy) row_.after_admission = buffer_;
    if (!dying.empty()) {
      Q acc(0);
      for (QueueId q : dying) acc += buffer_.get(q);
      row_.dying_acceptance = acc;
    }
    row_.live_count = live_count;

    std::vector<typename BasicBufferState<Q>::Entry> after;
    after.reserve(buffer_.nonempty());
    Q sent(0);
    const Q one = QuantityTraits<Q>::one();
    for (const auto& [q, v] : buffer_) {
      Q out = v < one ? v : one;
      sent += out;
      if (dead_.count(q)) result_.dead_transmissions[q] += out;
      if (v > out) after.emplace_back(q, v - out);
    }
    buffer_ = BasicBufferState<Q>::from_sorted(std::move(after));
    for (QueueId q : dying) dead_.insert(q);

    row_.transmitted = sent;
    result_.total_transmitted += sent;
    if (options_.record_occupancy) row_.after_transmission = buffer_;
    if (options_.record_slots) result_.slots.push_back(std::move(row_));
    policy_.transmitted(slot_, buffer_);
    admitted_ = false;
    ++slot_;
  }

  // Runs arrival-free slots until the buffer is empty and returns the result.
  BasicSimulationResult<Q> finish() {
    if (admitted_) throw ContractError("finish() inside an open slot");
    // Every queue holds at most B, so the buffer empties within B slots.
    const Slot limit = slot_ + config_.buffer_size + 1;
    while (!buffer_.empty()) {
      if (slot_ > limit) throw ContractError("buffer failed to drain within B slots");
      arrive({});
      transmit({}, 0);
    }
    return std::move(result_);
  }

 private:
  void check_admission(const BasicBufferState<Q>& virtual_state,
                       const BasicBufferState<Q>& next) const {
    for (const auto& [q, v] : next) {
      Q avail = virtual_state.get(q);
      if (v > avail)
        throw ContractError(policy_.name() + " kept " + format_quantity(v) + " packets in queue " +
                            std::to_string(q) + " at slot " + std::to_string(slot_) +
                            " but only " + format_quantity(avail) + " were available");
    }
    Q total = next.total();
    if (total > quantity<Q>(config_.buffer_size))
      throw ContractError(policy_.name() + " exceeded the buffer at slot " + std::to_string(slot_) +
                          ": " + format_quantity(total) + " > B=" +
                          std::to_string(config_.buffer_size));
  }

  SwitchConfig config_;
  BasicPushOutPolicy<Q>& policy_;
  SimulationOptions options_;
  BasicBufferState<Q> buffer_;
  BasicSimulationResult<Q> result_;
  BasicSlotTrace<Q> row_;
  std::set<QueueId> dead_;
  Slot slot_ = 0;
  bool admitted_ = false;
};

using Switch = BasicSwitch<Count>;
using FractionalSwitch = BasicSwitch<Rational>;

// Dying queues and live (non-dying) count for slot t, read from the schedule:
// a queue dies on t when it receives on t but not on t + 1.
struct SlotLiveness {
  std::vector<QueueId> dying;
  std::int64_t live_count = 0;
};
SlotLiveness liveness_at(const ArrivalSchedule& schedule, Slot t);

// Runs slots 0..T and then drains. Clairvoyant policies are given the schedule.
template <typename Q>
BasicSimulationResult<Q> simulate(const ArrivalSchedule& schedule, BasicPushOutPolicy<Q>& policy,
                                  const SwitchConfig& config, SimulationOptions options = {}) {
  if (policy.clairvoyant()) policy.prepare(schedule);
  BasicSwitch<Q> sw(config, policy, options);
  const Slot horizon = schedule.horizon();
  if (!schedule.empty()) {
    for (Slot t = 0; t <= horizon; ++t) {
      sw.arrive(schedule.at(t));
      SlotLiveness live = liveness_at(schedule, t);
      sw.transmit(live.dying, live.live_count);
    }
  }
  return sw.finish();
}

}  // namespace swmsim
