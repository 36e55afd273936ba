#include "swmsim/policies.hpp"

#include <algorithm>
#include <string>

#include "swmsim/brute_force.hpp"
#include "swmsim/engine.hpp"

namespace swmsim {

namespace {

// Tops up queues in `order` (up to their virtual occupancy) until the buffer
// holds min(B, virtual total). Keeps a policy regular without changing what it
// transmits when the extra packets are pushed out again next slot.
Count fill_to_regular(std::vector<BufferState::Entry>& kept, const BufferState& virtual_state,
                      Count buffer_size, const std::vector<QueueId>& order) {
  Count total = 0;
  for (const auto& [q, v] : kept) total += v;
  Count target = std::min(buffer_size, virtual_state.total());
  Count added = 0;
  for (QueueId q : order) {
    if (total >= target) break;
    auto it = std::lower_bound(kept.begin(), kept.end(), q,
                               [](const BufferState::Entry& e, QueueId id) { return e.first < id; });
    Count have = (it != kept.end() && it->first == q) ? it->second : 0;
    Count room = virtual_state.get(q) - have;
    Count take = std::min(room, target - total);
    if (take <= 0) continue;
    if (it != kept.end() && it->first == q)
      it->second += take;
    else
      kept.insert(it, {q, take});
    total += take;
    added += take;
  }
  return added;
}

void require_timeline_form(const ArrivalSchedule& schedule, const std::string& who) {
  for (Slot t = 1; t <= schedule.horizon(); ++t)
    for (const Arrival& a : schedule.at(t))
      if (a.count != schedule.buffer_size())
        throw InputError(who + " needs a timeline-form instance: queue " + std::to_string(a.queue) +
                         " receives " + std::to_string(a.count) + " packets at slot " + std::to_string(t));
}

}  // namespace

BufferState LqdPolicy::admit(const SlotView& view) {
  return water_fill(merge_arrivals(view.buffer, view.arrivals), view.buffer_size, order_);
}

FractionalBufferState FractionalLqdPolicy::admit(const FractionalSlotView& view) {
  return water_fill(merge_arrivals(view.buffer, view.arrivals), view.buffer_size);
}

void LateQdPolicy::prepare(const ArrivalSchedule& schedule) {
  priorities_ = compute_exit_times(schedule, packet_limit_);
  packets_.clear();
  per_queue_.clear();
}

BufferState LateQdPolicy::admit(const SlotView& view) {
  if (!priorities_) throw ContractError("lateqd used without exit times");
  for (const auto& [q, v] : view.buffer) {
    auto it = per_queue_.find(q);
    if (it == per_queue_.end() || static_cast<Count>(it->second.size()) != v)
      throw ContractError("lateqd packet bookkeeping out of sync at queue " + std::to_string(q));
  }
  for (const Arrival& a : view.arrivals) {
    auto exits = priorities_->exits(a.queue, view.slot);
    if (static_cast<Count>(exits.size()) != a.count)
      throw ContractError("lateqd was prepared for a different schedule");
    for (std::size_t i = 0; i < exits.size(); ++i) {
      Packet p{exits[i], a.queue, view.slot, i};
      packets_.insert(p);
      per_queue_[a.queue].insert(p);
    }
  }
  while (static_cast<Count>(packets_.size()) > view.buffer_size) {
    auto last = std::prev(packets_.end());
    auto& mine = per_queue_[std::get<1>(*last)];
    mine.erase(*last);
    if (mine.empty()) per_queue_.erase(std::get<1>(*last));
    packets_.erase(last);
  }
  std::vector<BufferState::Entry> out;
  for (const auto& [q, set] : per_queue_)
    if (!set.empty()) out.emplace_back(q, static_cast<Count>(set.size()));
  return BufferState::from_sorted(std::move(out));
}

void LateQdPolicy::transmitted(Slot, const BufferState&) {
  for (auto it = per_queue_.begin(); it != per_queue_.end();) {
    packets_.erase(*it->second.begin());
    it->second.erase(it->second.begin());
    if (it->second.empty())
      it = per_queue_.erase(it);
    else
      ++it;
  }
}

std::vector<Slot> LateQdPolicy::buffered_exits(QueueId q) const {
  std::vector<Slot> out;
  if (auto it = per_queue_.find(q); it != per_queue_.end())
    for (const auto& p : it->second) out.push_back(std::get<0>(p));
  return out;
}

void LateQdAggregatePolicy::prepare(const ArrivalSchedule& schedule) {
  require_timeline_form(schedule, "lateqd-aggregate");
  schedule_.emplace(schedule);
}

BufferState LateQdAggregatePolicy::admit(const SlotView& view) {
  if (!schedule_) throw ContractError("lateqd-aggregate used without the schedule");
  const Count B = view.buffer_size;
  const Slot t = view.slot;
  BufferState v = merge_arrivals(view.buffer, view.arrivals);

  if (static_cast<Count>(v.nonempty()) > B) {
    std::vector<BufferState::Entry> out;
    for (const auto& [q, x] : v) {
      if (static_cast<Count>(out.size()) == B) break;
      out.emplace_back(q, 1);
    }
    return BufferState::from_sorted(std::move(out));
  }

  std::vector<QueueId> live;
  std::vector<BufferState::Entry> rest;
  for (const auto& [q, x] : v) {
    bool now = schedule_->receives(t, q);
    if (now && schedule_->receives(t + 1, q))
      live.push_back(q);
    else
      rest.emplace_back(q, now ? std::min(x, B) : x);
  }
  BufferState others = water_fill(BufferState::from_sorted(std::move(rest)),
                                  B - static_cast<Count>(live.size()));
  std::vector<BufferState::Entry> kept(others.begin(), others.end());
  for (QueueId q : live) kept.emplace_back(q, 1);
  std::sort(kept.begin(), kept.end());

  std::vector<QueueId> order = live;
  for (const auto& [q, x] : v)
    if (!std::binary_search(live.begin(), live.end(), q)) order.push_back(q);
  fill_to_regular(kept, v, B, order);
  return BufferState::from_sorted(std::move(kept));
}

void StaircaseOfflinePolicy::prepare(const ArrivalSchedule& schedule) {
  require_timeline_form(schedule, "staircase-offline");
  const Slot T = schedule.horizon();
  if (T < 2) throw InputError("staircase-offline needs a horizon of at least 2 slots");
  const std::size_t receivers = schedule.at(1).size();
  if (receivers < 2) throw InputError("staircase-offline needs at least two receiving queues");
  for (Slot t = 1; t <= T; ++t) {
    if (schedule.at(t).size() != receivers)
      throw InputError("not a staircase instance: slot " + std::to_string(t) + " has " +
                       std::to_string(schedule.at(t).size()) + " receiving queues, expected " +
                       std::to_string(receivers));
    if (t < T && liveness_at(schedule, t).dying.size() != 1)
      throw InputError("not a staircase instance: slot " + std::to_string(t) +
                       " does not have exactly one dying queue");
  }
  const Count a = static_cast<Count>(receivers) - 1;
  const Count B = schedule.buffer_size();
  if (!accept_) {
    Count p = 0;
    while ((p + 1) * (p + 2) / 2 <= B - a) ++p;
    accept_ = p;
  }
  schedule_.emplace(schedule);
  extra_live_ = 0;
}

BufferState StaircaseOfflinePolicy::admit(const SlotView& view) {
  if (!schedule_) throw ContractError("staircase-offline used without the schedule");
  const Count B = view.buffer_size;
  const Slot t = view.slot;
  BufferState v = merge_arrivals(view.buffer, view.arrivals);

  std::vector<QueueId> live, dying;
  std::vector<BufferState::Entry> kept;
  Count used = 0;
  for (const auto& [q, x] : v) {
    bool now = schedule_->receives(t, q);
    if (now && schedule_->receives(t + 1, q)) {
      live.push_back(q);
      kept.emplace_back(q, 1);
      ++used;
    } else if (now) {
      dying.push_back(q);
    } else {
      kept.emplace_back(q, x);
      used += x;
    }
  }
  Count budget = B - used;
  if (budget < 0)
    throw ContractError("staircase-offline: dead queues and live queues overflow the buffer at slot " +
                        std::to_string(t));
  for (auto it = dying.rbegin(); it != dying.rend(); ++it) {
    Count take = std::min({*accept_, v.get(*it), budget});
    kept.emplace_back(*it, take);
    budget -= take;
  }
  std::sort(kept.begin(), kept.end());
  extra_live_ += fill_to_regular(kept, v, B, live);
  return BufferState::from_sorted(std::move(kept));
}

std::unique_ptr<PushOutPolicy> make_policy(const std::string& name) {
  if (name == "lqd") return std::make_unique<LqdPolicy>();
  if (name == "lateqd") return std::make_unique<LateQdPolicy>();
  if (name == "lateqd-aggregate") return std::make_unique<LateQdAggregatePolicy>();
  if (name == "staircase-offline") return std::make_unique<StaircaseOfflinePolicy>();
  if (name == "brute-force") return std::make_unique<BruteForcePolicy>();
  throw InputError("unknown integral policy '" + name + "'");
}

std::vector<std::string> policy_names() {
  return {"lqd", "lqd-frac", "lateqd", "lateqd-aggregate", "staircase-offline", "brute-force"};
}

}  // namespace swmsim
