#pragma once

#include <map>
#include <span>
#include <utility>
#include <vector>

#include "swmsim/model.hpp"

namespace swmsim {

// Exit slots each packet would get with an unbounded buffer and LIFO service.
class PacketPriorityMap {
 public:
  // Exit slots of the packets arriving to q at t, in push order.
  std::span<const Slot> exits(QueueId q, Slot t) const;
  Count packet_count() const { return packets_; }
  const std::map<std::pair<QueueId, Slot>, std::vector<Slot>>& all() const { return exits_; }

 private:
  friend PacketPriorityMap compute_exit_times(const ArrivalSchedule&, Count);
  std::map<std::pair<QueueId, Slot>, std::vector<Slot>> exits_;
  Count packets_ = 0;
};

inline constexpr Count kDefaultPacketLimit = 10'000'000;

// Same-slot packets are pushed in arrival order, so the last one pops first.
PacketPriorityMap compute_exit_times(const ArrivalSchedule& schedule,
                                     Count packet_limit = kDefaultPacketLimit);

}  // namespace swmsim
