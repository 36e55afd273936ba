#include "swmsim/engine.hpp"

namespace swmsim {

SlotLiveness liveness_at(const ArrivalSchedule& schedule, Slot t) {
  SlotLiveness out;
  auto now = schedule.at(t);
  auto next = schedule.at(t + 1);
  auto it = next.begin();
  for (const Arrival& a : now) {
    if (a.count == 0) continue;
    while (it != next.end() && it->queue < a.queue) ++it;
    bool continues = it != next.end() && it->queue == a.queue && it->count > 0;
    if (continues)
      ++out.live_count;
    else
      out.dying.push_back(a.queue);
  }
  return out;
}

}  // namespace swmsim
