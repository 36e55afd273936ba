#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "swmsim/exit_times.hpp"
#include "swmsim/policy.hpp"
#include "swmsim/water_fill.hpp"

namespace swmsim {

class LqdPolicy : public PushOutPolicy {
 public:
  explicit LqdPolicy(RemainderOrder order = RemainderOrder::LowestIdFirst) : order_(order) {}
  std::string name() const override { return "lqd"; }
  BufferState admit(const SlotView& view) override;

 private:
  RemainderOrder order_;
};

class FractionalLqdPolicy : public FractionalPushOutPolicy {
 public:
  std::string name() const override { return "lqd-frac"; }
  FractionalBufferState admit(const FractionalSlotView& view) override;
};

// Packet-level LateQD: on overflow, push out the packets whose unbounded-buffer
// exit slot is latest (ties: larger queue id, then later arrival).
class LateQdPolicy : public PushOutPolicy {
 public:
  explicit LateQdPolicy(Count packet_limit = kDefaultPacketLimit) : packet_limit_(packet_limit) {}
  std::string name() const override { return "lateqd"; }
  bool clairvoyant() const override { return true; }
  void prepare(const ArrivalSchedule& schedule) override;
  BufferState admit(const SlotView& view) override;
  void transmitted(Slot t, const BufferState& after) override;

  // Exit slots of the packets currently buffered in q, ascending.
  std::vector<Slot> buffered_exits(QueueId q) const;

 private:
  // (exit, queue, entry slot, index within slot); larger sorts later and is dropped first.
  using Packet = std::tuple<Slot, QueueId, Slot, std::size_t>;

  Count packet_limit_;
  std::optional<PacketPriorityMap> priorities_;
  std::set<Packet> packets_;
  std::map<QueueId, std::set<Packet>> per_queue_;
};

// LateQD on timeline-form instances, working on counts only. The classification
// of queues as live, dying or dead reads the next slot of the schedule.
class LateQdAggregatePolicy : public PushOutPolicy {
 public:
  std::string name() const override { return "lateqd-aggregate"; }
  bool clairvoyant() const override { return true; }
  void prepare(const ArrivalSchedule& schedule) override;
  BufferState admit(const SlotView& view) override;

 private:
  std::optional<ArrivalSchedule> schedule_;
};

// Offline algorithm for the staircase instance: one packet per live queue,
// up to p packets from each dying queue, dead queues left alone.
class StaircaseOfflinePolicy : public PushOutPolicy {
 public:
  StaircaseOfflinePolicy() = default;
  explicit StaircaseOfflinePolicy(Count accept) : accept_(accept) {}
  std::string name() const override { return "staircase-offline"; }
  bool clairvoyant() const override { return true; }
  void prepare(const ArrivalSchedule& schedule) override;
  BufferState admit(const SlotView& view) override;

  Count accept() const { return accept_.value_or(0); }
  Count extra_live() const { return extra_live_; }

 private:
  std::optional<Count> accept_;
  Count extra_live_ = 0;
  std::optional<ArrivalSchedule> schedule_;
};

std::unique_ptr<PushOutPolicy> make_policy(const std::string& name);
std::vector<std::string> policy_names();

}  // namespace swmsim
