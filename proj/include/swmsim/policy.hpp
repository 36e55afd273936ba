#pragma once

#include <span>
#include <string>

#include "swmsim/model.hpp"

namespace swmsim {

// What a policy sees during the arrival phase of one slot.
template <typename Q>
struct BasicSlotView {
  Slot slot = 0;
  Count buffer_size = 1;
  const BasicBufferState<Q>& buffer;  // contents at the start of the slot
  std::span<const Arrival> arrivals;  // this slot's arrivals, sorted by queue
};

// A push-out buffer management policy. admit() returns the post-admission
// state, which the engine checks against old contents plus arrivals and B.
template <typename Q>
class BasicPushOutPolicy {
 public:
  virtual ~BasicPushOutPolicy() = default;

  virtual std::string name() const = 0;

  // Clairvoyant policies get the whole schedule through prepare() before slot 0.
  // Online policies never see it.
  virtual bool clairvoyant() const { return false; }
  virtual void prepare(const ArrivalSchedule&) {}

  virtual BasicBufferState<Q> admit(const BasicSlotView<Q>& view) = 0;

  // Called after the transmission phase with the resulting buffer.
  virtual void transmitted(Slot, const BasicBufferState<Q>&) {}
};

using PushOutPolicy = BasicPushOutPolicy<Count>;
using FractionalPushOutPolicy = BasicPushOutPolicy<Rational>;
using SlotView = BasicSlotView<Count>;
using FractionalSlotView = BasicSlotView<Rational>;

}  // namespace swmsim
