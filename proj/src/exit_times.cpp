#include "swmsim/exit_times.hpp"

#include <string>

namespace swmsim {

std::span<const Slot> PacketPriorityMap::exits(QueueId q, Slot t) const {
  auto it = exits_.find({q, t});
  if (it == exits_.end()) return {};
  return it->second;
}

PacketPriorityMap compute_exit_times(const ArrivalSchedule& schedule, Count packet_limit) {
  Count total = schedule.total();
  if (total > packet_limit)
    throw InputError("schedule has " + std::to_string(total) + " packets, over the per-packet limit of " +
                     std::to_string(packet_limit) + "; use the aggregate LateQD form");

  PacketPriorityMap map;
  map.packets_ = total;
  // Per queue: the slots carrying arrivals, in order.
  std::map<QueueId, std::vector<std::pair<Slot, Count>>> per_queue;
  for (Slot t = 0; t <= schedule.horizon(); ++t)
    for (const Arrival& a : schedule.at(t))
      if (a.count > 0) per_queue[a.queue].emplace_back(t, a.count);

  struct Entry {
    std::vector<Slot>* slot_exits;
    std::size_t index;
  };
  for (const auto& [q, arrivals] : per_queue) {
    std::vector<Entry> stack;
    std::size_t next = 0;
    Slot t = arrivals.front().first;
    while (next < arrivals.size() || !stack.empty()) {
      if (stack.empty() && next < arrivals.size()) t = std::max(t, arrivals[next].first);
      if (next < arrivals.size() && arrivals[next].first == t) {
        auto& slot_exits = map.exits_[{q, t}];
        slot_exits.assign(static_cast<std::size_t>(arrivals[next].second), 0);
        for (std::size_t i = 0; i < slot_exits.size(); ++i) stack.push_back({&slot_exits, i});
        ++next;
      }
      Entry top = stack.back();
      stack.pop_back();
      (*top.slot_exits)[top.index] = t;
      ++t;
    }
  }
  return map;
}

}  // namespace swmsim
