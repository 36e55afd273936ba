#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "swmsim/types.hpp"

namespace swmsim {

struct SwitchConfig {
  Count buffer_size = 1;
  // nullopt: unbounded, queue ids are used as given.
  std::optional<std::int64_t> max_queues;

  void validate() const;
};

struct Arrival {
  QueueId queue = 0;
  Count count = 0;

  friend bool operator==(const Arrival&, const Arrival&) = default;
};

// Explicit per-slot, per-queue arrival counts. Slot 0 carries initial loads.
class ArrivalSchedule {
 public:
  explicit ArrivalSchedule(Count buffer_size);

  // Adds n packets for queue q at slot t; counts for the same (t, q) accumulate.
  void add(Slot t, QueueId q, Count n);

  Count buffer_size() const { return buffer_size_; }
  // Last slot carrying arrivals (0 for an empty schedule).
  Slot horizon() const;
  std::span<const Arrival> at(Slot t) const;
  Count count(Slot t, QueueId q) const;
  bool receives(Slot t, QueueId q) const { return count(t, q) > 0; }
  Count total() const;
  std::vector<QueueId> queues() const;
  bool empty() const { return total() == 0; }

  friend bool operator==(const ArrivalSchedule&, const ArrivalSchedule&) = default;

 private:
  Count buffer_size_;
  std::vector<std::vector<Arrival>> slots_;
};

struct QueueLife {
  QueueId id = 0;
  // Arrival interval [begin, end]; B packets arrive on each of its slots.
  // Empty when begin > end.
  Slot begin = 1;
  Slot end = 0;
  Count initial_load = 0;

  bool has_interval() const { return begin <= end; }
  // Slot on which the queue stops receiving (dying slot), if it receives at all.
  std::optional<Slot> dying_slot() const;

  friend bool operator==(const QueueLife&, const QueueLife&) = default;
};

class QueueTimeline {
 public:
  QueueTimeline() = default;

  void add(QueueLife life);
  const std::vector<QueueLife>& queues() const { return queues_; }
  bool empty() const { return queues_.empty(); }
  const QueueLife* find(QueueId id) const;
  // Last slot with arrivals (0 when only initial loads or nothing).
  Slot horizon() const;

  friend bool operator==(const QueueTimeline&, const QueueTimeline&) = default;

 private:
  std::vector<QueueLife> queues_;  // sorted by id
};

// Expands a timeline to explicit arrivals. With a bounded queue count, logical
// queues are mapped onto physical ids 1..N, reusing a physical queue only once
// its previous occupant has stopped receiving for more than drain_slots slots.
ArrivalSchedule expand(const QueueTimeline& timeline, const SwitchConfig& config,
                       Slot drain_slots);

// Per-queue occupancy. Only nonempty queues are stored, sorted by id.
template <typename Q>
class BasicBufferState {
 public:
  using Entry = std::pair<QueueId, Q>;

  BasicBufferState() = default;

  Q get(QueueId q) const {
    auto it = lower(q);
    return (it != entries_.end() && it->first == q) ? it->second : Q(0);
  }

  void set(QueueId q, const Q& value) {
    if (value < 0) throw ContractError("negative occupancy for queue " + std::to_string(q));
    auto it = lower(q);
    bool present = it != entries_.end() && it->first == q;
    if (value == 0) {
      if (present) entries_.erase(it);
    } else if (present) {
      it->second = value;
    } else {
      entries_.insert(it, Entry{q, value});
    }
  }

  void add(QueueId q, const Q& delta) { set(q, get(q) + delta); }

  Q total() const {
    Q sum(0);
    for (const auto& [q, v] : entries_) sum += v;
    return sum;
  }

  std::size_t nonempty() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<Entry>& entries() const { return entries_; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  // Builds from entries sorted by id; zero entries are skipped.
  static BasicBufferState from_sorted(std::vector<Entry> entries) {
    BasicBufferState s;
    s.entries_.reserve(entries.size());
    for (auto& e : entries) {
      if (e.second < 0) throw ContractError("negative occupancy for queue " + std::to_string(e.first));
      if (e.second != 0) s.entries_.push_back(std::move(e));
    }
    if (!std::is_sorted(s.entries_.begin(), s.entries_.end(),
                        [](const Entry& a, const Entry& b) { return a.first < b.first; }))
      throw ContractError("buffer state entries not sorted by queue id");
    return s;
  }

  friend bool operator==(const BasicBufferState& a, const BasicBufferState& b) {
    return a.entries_ == b.entries_;
  }

 private:
  typename std::vector<Entry>::iterator lower(QueueId q) {
    return std::lower_bound(entries_.begin(), entries_.end(), q,
                            [](const Entry& e, QueueId id) { return e.first < id; });
  }
  typename std::vector<Entry>::const_iterator lower(QueueId q) const {
    return std::lower_bound(entries_.begin(), entries_.end(), q,
                            [](const Entry& e, QueueId id) { return e.first < id; });
  }

  std::vector<Entry> entries_;
};

using BufferState = BasicBufferState<Count>;
using FractionalBufferState = BasicBufferState<Rational>;

// Buffer contents merged with this slot's arrivals (the "virtual" buffer).
template <typename Q>
BasicBufferState<Q> merge_arrivals(const BasicBufferState<Q>& state,
                                   std::span<const Arrival> arrivals) {
  std::vector<typename BasicBufferState<Q>::Entry> out;
  out.reserve(state.nonempty() + arrivals.size());
  auto it = state.begin();
  for (const Arrival& a : arrivals) {
    while (it != state.end() && it->first < a.queue) out.push_back(*it++);
    if (it != state.end() && it->first == a.queue) {
      out.emplace_back(a.queue, it->second + quantity<Q>(a.count));
      ++it;
    } else {
      out.emplace_back(a.queue, quantity<Q>(a.count));
    }
  }
  while (it != state.end()) out.push_back(*it++);
  return BasicBufferState<Q>::from_sorted(std::move(out));
}

// One row of a simulation trace.
template <typename Q>
struct BasicSlotTrace {
  Slot slot = 0;
  Q transmitted{0};
  // Post-admission occupancy of the queues dying on this slot; absent when none dies.
  std::optional<Q> dying_acceptance;
  // Queues receiving on this slot that keep receiving on the next one.
  std::int64_t live_count = 0;
  // Post-admission total.
  Q total_occupancy{0};
  Q dropped{0};
  std::optional<BasicBufferState<Q>> after_admission;
  std::optional<BasicBufferState<Q>> after_transmission;
};

template <typename Q>
struct BasicSimulationResult {
  Q total_transmitted{0};
  Q total_arrivals{0};
  Q total_dropped{0};
  std::vector<BasicSlotTrace<Q>> slots;
  // Packets transmitted from a queue on slots after its dying slot.
  std::map<QueueId, Q> dead_transmissions;
};

using SlotTrace = BasicSlotTrace<Count>;
using SimulationResult = BasicSimulationResult<Count>;
using FractionalSimulationResult = BasicSimulationResult<Rational>;

}  // namespace swmsim
