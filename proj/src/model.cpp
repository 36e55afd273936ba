#include "swmsim/model.hpp"

#include <numeric>
#include <queue>
#include <set>
#include <string>

namespace swmsim {

void SwitchConfig::validate() const {
  if (buffer_size < 1) throw InputError("buffer size B must be at least 1");
  if (max_queues && *max_queues < 1) throw InputError("queue count N must be at least 1");
}

ArrivalSchedule::ArrivalSchedule(Count buffer_size) : buffer_size_(buffer_size) {
  if (buffer_size < 1) throw InputError("buffer size B must be at least 1");
}

void ArrivalSchedule::add(Slot t, QueueId q, Count n) {
  if (t < 0) throw InputError("arrival slot must be non-negative, got " + std::to_string(t));
  if (n < 0) throw InputError("arrival count must be non-negative");
  if (n == 0) return;
  if (static_cast<std::size_t>(t) >= slots_.size()) slots_.resize(static_cast<std::size_t>(t) + 1);
  auto& row = slots_[static_cast<std::size_t>(t)];
  auto it = std::lower_bound(row.begin(), row.end(), q,
                             [](const Arrival& a, QueueId id) { return a.queue < id; });
  Count updated = n;
  if (it != row.end() && it->queue == q) updated += it->count;
  if (updated > buffer_size_)
    throw InputError("more than B packets for queue " + std::to_string(q) + " at slot " +
                     std::to_string(t));
  if (it != row.end() && it->queue == q)
    it->count = updated;
  else
    row.insert(it, Arrival{q, n});
}

Slot ArrivalSchedule::horizon() const {
  for (std::size_t t = slots_.size(); t-- > 0;)
    if (!slots_[t].empty()) return static_cast<Slot>(t);
  return 0;
}

std::span<const Arrival> ArrivalSchedule::at(Slot t) const {
  if (t < 0 || static_cast<std::size_t>(t) >= slots_.size()) return {};
  return slots_[static_cast<std::size_t>(t)];
}

Count ArrivalSchedule::count(Slot t, QueueId q) const {
  auto row = at(t);
  auto it = std::lower_bound(row.begin(), row.end(), q,
                             [](const Arrival& a, QueueId id) { return a.queue < id; });
  return (it != row.end() && it->queue == q) ? it->count : 0;
}

Count ArrivalSchedule::total() const {
  Count sum = 0;
  for (const auto& row : slots_)
    for (const auto& a : row) sum += a.count;
  return sum;
}

std::vector<QueueId> ArrivalSchedule::queues() const {
  std::set<QueueId> ids;
  for (const auto& row : slots_)
    for (const auto& a : row) ids.insert(a.queue);
  return {ids.begin(), ids.end()};
}

std::optional<Slot> QueueLife::dying_slot() const {
  if (has_interval()) return end;
  if (initial_load > 0) return Slot{0};
  return std::nullopt;
}

void QueueTimeline::add(QueueLife life) {
  if (life.initial_load < 0) throw InputError("initial load must be non-negative");
  if (life.has_interval() && life.begin < 0)
    throw InputError("live interval of queue " + std::to_string(life.id) + " starts before slot 0");
  if (life.has_interval() && life.begin == 0 && life.initial_load > 0)
    throw InputError("queue " + std::to_string(life.id) +
                     " has both an initial load and arrivals on slot 0");
  auto it = std::lower_bound(queues_.begin(), queues_.end(), life.id,
                             [](const QueueLife& l, QueueId id) { return l.id < id; });
  if (it != queues_.end() && it->id == life.id)
    throw InputError("duplicate queue id " + std::to_string(life.id) + " in timeline");
  queues_.insert(it, life);
}

const QueueLife* QueueTimeline::find(QueueId id) const {
  auto it = std::lower_bound(queues_.begin(), queues_.end(), id,
                             [](const QueueLife& l, QueueId q) { return l.id < q; });
  return (it != queues_.end() && it->id == id) ? &*it : nullptr;
}

Slot QueueTimeline::horizon() const {
  Slot h = 0;
  for (const auto& q : queues_)
    if (q.has_interval()) h = std::max(h, q.end);
  return h;
}

namespace {

struct Occupant {
  Slot first;
  Slot last;
  QueueId logical;
};

std::optional<Occupant> occupancy_span(const QueueLife& q) {
  std::optional<Slot> first, last;
  if (q.initial_load > 0) first = last = Slot{0};
  if (q.has_interval()) {
    if (!first) first = q.begin;
    last = q.end;
  }
  if (!first) return std::nullopt;
  return Occupant{*first, *last, q.id};
}

}  // namespace

ArrivalSchedule expand(const QueueTimeline& timeline, const SwitchConfig& config,
                       Slot drain_slots) {
  config.validate();
  if (drain_slots < 0) throw InputError("drain slots must be non-negative");
  const Count B = config.buffer_size;
  for (const auto& q : timeline.queues())
    if (q.initial_load > B)
      throw InputError("initial load of queue " + std::to_string(q.id) + " exceeds B");

  std::map<QueueId, QueueId> physical;
  bool identity = !config.max_queues.has_value();
  if (!identity) {
    identity = std::all_of(timeline.queues().begin(), timeline.queues().end(),
                           [&](const QueueLife& q) { return q.id >= 1 && q.id <= *config.max_queues; });
  }
  if (identity) {
    for (const auto& q : timeline.queues()) physical[q.id] = q.id;
  } else {
    std::vector<Occupant> spans;
    for (const auto& q : timeline.queues())
      if (auto s = occupancy_span(q)) spans.push_back(*s);
    std::sort(spans.begin(), spans.end(), [](const Occupant& a, const Occupant& b) {
      return a.first != b.first ? a.first < b.first : a.logical < b.logical;
    });
    const QueueId n = *config.max_queues;
    // Physical queue -> last receiving slot of its current occupant.
    std::vector<std::optional<Slot>> busy_until(static_cast<std::size_t>(n) + 1);
    for (const auto& s : spans) {
      QueueId chosen = 0;
      for (QueueId p = 1; p <= n; ++p) {
        const auto& last = busy_until[static_cast<std::size_t>(p)];
        if (!last || *last + drain_slots < s.first) {
          chosen = p;
          break;
        }
      }
      if (chosen == 0)
        throw InputError("cannot recycle queues within N=" + std::to_string(n) +
                         ": no free queue at slot " + std::to_string(s.first));
      busy_until[static_cast<std::size_t>(chosen)] = s.last;
      physical[s.logical] = chosen;
    }
  }

  ArrivalSchedule schedule(B);
  for (const auto& q : timeline.queues()) {
    auto it = physical.find(q.id);
    if (it == physical.end()) continue;
    if (q.initial_load > 0) schedule.add(0, it->second, q.initial_load);
    if (q.has_interval())
      for (Slot t = q.begin; t <= q.end; ++t) schedule.add(t, it->second, B);
  }
  return schedule;
}

}  // namespace swmsim
