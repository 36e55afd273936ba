#pragma once

#include <string>
#include <vector>

#include "swmsim/model.hpp"

namespace swmsim {

struct RegularityViolation {
  enum class Kind { NotWorkConserving, UnforcedDrop, MissingSnapshot };
  Kind kind;
  Slot slot = 0;
  std::string detail;

  std::string label() const;
};

// Checks a trace recorded with occupancy snapshots: every nonempty queue sends
// on every slot, and packets are dropped only when the virtual buffer overflows.
template <typename Q>
std::vector<RegularityViolation> check_regularity(const BasicSimulationResult<Q>& result,
                                                  const ArrivalSchedule& schedule, Count buffer_size) {
  using V = RegularityViolation;
  std::vector<V> out;
  BasicBufferState<Q> before;
  const Q one = QuantityTraits<Q>::one();
  const Q cap = quantity<Q>(buffer_size);
  for (const auto& row : result.slots) {
    if (!row.after_admission || !row.after_transmission) {
      out.push_back({V::Kind::MissingSnapshot, row.slot, "trace has no occupancy snapshot"});
      return out;
    }
    Q virtual_total = merge_arrivals(before, schedule.at(row.slot)).total();
    Q target = virtual_total < cap ? virtual_total : cap;
    Q kept = row.after_admission->total();
    if (kept < target)
      out.push_back({V::Kind::UnforcedDrop, row.slot,
                     "kept " + format_quantity(kept) + " of " + format_quantity(virtual_total) +
                         " with room for " + format_quantity(target)});
    for (const auto& [q, v] : *row.after_admission) {
      Q expect = v > one ? Q(v - one) : Q(0);
      Q got = row.after_transmission->get(q);
      if (got != expect) {
        out.push_back({V::Kind::NotWorkConserving, row.slot,
                       "queue " + std::to_string(q) + " went from " + format_quantity(v) + " to " +
                           format_quantity(got)});
        break;
      }
    }
    before = *row.after_transmission;
  }
  return out;
}

}  // namespace swmsim
