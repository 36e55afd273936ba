#include "swmsim/timeline_engine.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "swmsim/instances.hpp"
#include "swmsim/policies.hpp"

namespace swmsim {

namespace {

// Counts over queue ids, for "the r-th smallest id in this set" queries.
class Fenwick {
 public:
  explicit Fenwick(std::size_t n) : tree_(n + 1, 0) {
    top_ = 1;
    while (top_ * 2 <= n) top_ *= 2;
  }
  void add(QueueId id, int delta) {
    for (std::size_t i = static_cast<std::size_t>(id); i < tree_.size(); i += i & (~i + 1)) tree_[i] += delta;
  }
  // Smallest id whose prefix count reaches r (r >= 1).
  QueueId kth(Count r) const {
    std::size_t pos = 0;
    for (std::size_t step = top_; step > 0; step /= 2) {
      if (pos + step < tree_.size() && tree_[pos + step] < r) {
        pos += step;
        r -= tree_[pos];
      }
    }
    return static_cast<QueueId>(pos + 1);
  }

 private:
  std::vector<Count> tree_;
  std::size_t top_;
};

struct Lifecycle {
  Slot death = -1;
};

class TimelineRun {
 public:
  TimelineRun(const QueueTimeline& timeline, Count B, TimelinePolicy policy, const TimelineRunOptions& options)
      : tl_(timeline), B_(B), policy_(policy), opt_(options), marks_(max_id(timeline) + 1),
        empty_at_(static_cast<std::size_t>(max_id(timeline)) + 1, -1),
        died_(static_cast<std::size_t>(max_id(timeline)) + 1, -1) {}

  SimulationResult run() {
    if (tl_.empty()) return std::move(result_);
    index_events();
    slot_zero();
    const Slot T = tl_.horizon();
    for (Slot t = 1; t <= T; ++t) step(t);
    for (Slot t = T + 1;; ++t) {
      purge(t);
      if (dead_count_ == 0) break;
      drain(t);
    }
    return std::move(result_);
  }

 private:
  static QueueId max_id(const QueueTimeline& tl) {
    QueueId m = 0;
    for (const auto& q : tl.queues()) {
      if (q.id < 1) throw InputError("timeline engine needs positive queue ids");
      m = std::max(m, q.id);
    }
    return m;
  }

  void index_events() {
    for (const auto& q : tl_.queues()) {
      if (q.has_interval() && q.end >= 1) {
        births_.emplace_back(std::max<Slot>(q.begin, 1), q.id);
        deaths_.emplace_back(q.end, q.id);
      }
    }
    std::sort(births_.begin(), births_.end());
    std::sort(deaths_.begin(), deaths_.end());
  }

  bool receives(const QueueLife& q, Slot t) const {
    if (t == 0 && q.initial_load > 0) return true;
    return q.has_interval() && q.begin <= t && t <= q.end;
  }

  // ---- dead queues, grouped by the slot on which they run empty ----

  void dead_insert(QueueId q, Slot e) {
    groups_[e].push_back(q);
    empty_at_[static_cast<std::size_t>(q)] = e;
    ++dead_count_;
    dead_sum_ += e;
  }

  // Transmissions while dead, for a queue whose last packet left on slot last.
  void settle(QueueId q, Slot last) {
    Slot d = died_[static_cast<std::size_t>(q)];
    if (d >= 0 && opt_.record_dead_transmissions && last > d) result_.dead_transmissions[q] += last - d;
    died_[static_cast<std::size_t>(q)] = -1;
  }

  void purge(Slot t) {
    while (!groups_.empty() && groups_.begin()->first <= t) {
      auto& [e, ids] = *groups_.begin();
      for (QueueId q : ids) {
        empty_at_[static_cast<std::size_t>(q)] = -1;
        settle(q, e - 1);
      }
      dead_count_ -= static_cast<Count>(ids.size());
      dead_sum_ -= static_cast<__int128>(e) * static_cast<__int128>(ids.size());
      groups_.erase(groups_.begin());
    }
  }

  void dead_remove(QueueId q, Slot t) {
    Slot e = empty_at_[static_cast<std::size_t>(q)];
    if (e < 0) return;
    auto& ids = groups_[e];
    ids.erase(std::find(ids.begin(), ids.end(), q));
    if (ids.empty()) groups_.erase(e);
    empty_at_[static_cast<std::size_t>(q)] = -1;
    --dead_count_;
    dead_sum_ -= e;
    settle(q, t - 1);
  }

  Count dead_total(Slot t) const { return static_cast<Count>(dead_sum_ - static_cast<__int128>(t) * dead_count_); }

  void die(QueueId q, Slot t, Count value) {
    if (opt_.on_death) opt_.on_death(q, t, value);
    if (value > 0) {
      died_[static_cast<std::size_t>(q)] = t;
      dead_insert(q, t + value);
    }
  }

  // ---- water fill with a top class of `top` queues holding at least B ----

  struct Fill {
    Count level = 0;
    Count remainder = 0;
    std::vector<QueueId> clipped;  // dead queues above the level
    Count members = 0;             // top class + clipped
  };

  Fill fill(Slot t, Count top, Count budget) {
    Fill f;
    Count cls = top;
    Count rest = dead_total(t);
    Count hi = B_;
    std::vector<Slot> taken;
    auto it = groups_.rbegin();
    for (;; ++it) {
      if (it == groups_.rend()) {
        f.level = std::min(hi, (budget - rest) / cls);
        break;
      }
      Count u = it->first - t;
      if (static_cast<__int128>(cls) * u + rest <= budget) {
        f.level = std::min(hi, (budget - rest) / cls);
        break;
      }
      cls += static_cast<Count>(it->second.size());
      rest -= u * static_cast<Count>(it->second.size());
      hi = u;
      taken.push_back(it->first);
    }
    for (Slot e : taken) {
      auto g = groups_.find(e);
      for (QueueId q : g->second) {
        f.clipped.push_back(q);
        empty_at_[static_cast<std::size_t>(q)] = -1;
      }
      dead_count_ -= static_cast<Count>(g->second.size());
      dead_sum_ -= static_cast<__int128>(e) * static_cast<__int128>(g->second.size());
      groups_.erase(g);
    }
    f.members = cls;
    f.remainder = budget - (cls * f.level + rest);
    return f;
  }

  // Marks the set members, finds the id boundary of the remainder and returns
  // a predicate telling which members get one extra packet.
  std::function<bool(QueueId)> remainder_rule(const Fill& f, RemainderOrder order) {
    if (f.remainder <= 0) return [](QueueId) { return false; };
    for (QueueId q : f.clipped) marks_.add(q, 1);
    QueueId theta;
    bool ascending = order == RemainderOrder::LowestIdFirst;
    if (ascending)
      theta = marks_.kth(f.remainder);
    else
      theta = marks_.kth(f.members - f.remainder + 1);
    for (QueueId q : f.clipped) marks_.add(q, -1);
    if (ascending) return [theta](QueueId q) { return q <= theta; };
    return [theta](QueueId q) { return q >= theta; };
  }

  // Puts clipped dead queues back at their new values; returns how many got an extra packet.
  Count restore_clipped(const Fill& f, Slot t, const std::function<bool(QueueId)>& plus) {
    Count extra = 0;
    for (QueueId q : f.clipped) {
      Count v = f.level + (plus(q) ? 1 : 0);
      if (plus(q)) ++extra;
      if (v > 0)
        dead_insert(q, t + v);
      else
        settle(q, t - 1);
    }
    return extra;
  }

  // ---- slots ----

  void slot_zero() {
    std::vector<BufferState::Entry> v;
    ArrivalSchedule two(B_);
    for (const auto& q : tl_.queues()) {
      Count c = q.initial_load + (receives(q, 0) && q.has_interval() && q.begin == 0 ? B_ : 0);
      if (c > 0) {
        v.emplace_back(q.id, c);
        two.add(0, q.id, c);
      }
      if (receives(q, 1)) two.add(1, q.id, B_);
    }
    BufferState virt = BufferState::from_sorted(v);
    result_.total_arrivals += virt.total();
    BufferState kept;
    SlotView view{0, B_, empty_, std::span<const Arrival>(two.at(0))};
    if (policy_ == TimelinePolicy::Lqd) {
      kept = water_fill(virt, B_, opt_.order);
    } else if (policy_ == TimelinePolicy::LateQdAggregate) {
      LateQdAggregatePolicy p;
      p.prepare(two);
      kept = p.admit(view);
    } else {
      accept_ = opt_.accept.value_or(
          staircase_p(B_, std::max<Count>(0, static_cast<Count>(two.at(1).size()) - 1)));
      kept = staircase_zero(virt, two);
    }

    SlotTrace row;
    row.slot = 0;
    Count dying_total = 0;
    bool any_dying = false;
    for (const auto& [q, x] : virt) {
      if (two.receives(1, q)) {
        ++row.live_count;
        continue;
      }
      any_dying = true;
      Count held = kept.get(q);
      dying_total += held;
      die(q, 0, held);
    }
    // Survivors that keep receiving are tracked only as receivers from now on.
    if (any_dying) row.dying_acceptance = dying_total;
    row.transmitted = static_cast<Count>(kept.nonempty());
    row.total_occupancy = kept.total();
    row.dropped = virt.total() - row.total_occupancy;
    finish_row(row);
  }

  BufferState staircase_zero(const BufferState& virt, const ArrivalSchedule& two) {
    std::vector<BufferState::Entry> out;
    std::vector<QueueId> live, dying;
    Count budget = B_;
    for (const auto& [q, x] : virt) {
      if (two.receives(1, q)) {
        live.push_back(q);
        --budget;
      } else {
        dying.push_back(q);
      }
    }
    std::map<QueueId, Count> take;
    for (auto it = dying.rbegin(); it != dying.rend(); ++it) {
      Count x = std::min({accept_, virt.get(*it), std::max<Count>(budget, 0)});
      take[*it] = x;
      budget -= x;
    }
    if (budget < 0) throw ContractError("staircase-offline: live queues overflow the buffer at slot 0");
    for (const auto& [q, x] : virt)
      out.emplace_back(q, std::binary_search(live.begin(), live.end(), q) ? 1 : take[q]);
    // Extra packets in live queues keep the run regular; they are pushed out next slot.
    for (auto& [q, x] : out) {
      if (budget <= 0) break;
      if (!std::binary_search(live.begin(), live.end(), q)) continue;
      Count room = std::min(virt.get(q) - x, budget);
      x += room;
      budget -= room;
    }
    return BufferState::from_sorted(std::move(out));
  }

  void finish_row(SlotTrace& row) {
    result_.total_transmitted += row.transmitted;
    result_.total_dropped += row.dropped;
    carried_ = row.total_occupancy - row.transmitted;
    if (opt_.record_slots) result_.slots.push_back(row);
  }

  void step(Slot t) {
    purge(t);
    for (; next_birth_ < births_.size() && births_[next_birth_].first == t; ++next_birth_) {
      QueueId q = births_[next_birth_].second;
      dead_remove(q, t);
      ++receivers_;
      if (policy_ == TimelinePolicy::Lqd) marks_.add(q, 1);
    }
    std::vector<QueueId> dying;
    for (; next_death_ < deaths_.size() && deaths_[next_death_].first == t; ++next_death_)
      dying.push_back(deaths_[next_death_].second);
    const Count n_dying = static_cast<Count>(dying.size());
    const Count n_live = receivers_ - n_dying;
    const Count arrivals = receivers_ * B_;
    result_.total_arrivals += arrivals;
    const Count virtual_total = carried_ + arrivals;

    SlotTrace row;
    row.slot = t;
    row.live_count = n_live;
    Count dying_total = 0;
    Count sent = 0;

    if (policy_ == TimelinePolicy::Lqd) {
      if (receivers_ == 0) {
        row.total_occupancy = virtual_total;
      } else if (virtual_total <= B_) {
        // A single receiver alone in an otherwise empty buffer keeps everything.
        for (QueueId q : dying) {
          dying_total += virtual_total;
          marks_.add(q, -1);
          die(q, t, virtual_total);
        }
        sent += receivers_;
        row.total_occupancy = virtual_total;
      } else {
        Fill f = fill(t, receivers_, B_);
        auto plus = remainder_rule(f, opt_.order);
        Count dead_extra = restore_clipped(f, t, plus);
        sent += f.level >= 1 ? receivers_ : f.remainder - dead_extra;
        for (QueueId q : dying) {
          Count v = f.level + (plus(q) ? 1 : 0);
          dying_total += v;
          marks_.add(q, -1);
          die(q, t, v);
        }
        row.total_occupancy = B_;
      }
    } else if (policy_ == TimelinePolicy::LateQdAggregate) {
      if (receivers_ + dead_count_ > B_)
        throw ContractError("more nonempty queues than B on slot " + std::to_string(t) +
                            "; the timeline engine does not cover this case");
      const Count budget = B_ - n_live;
      if (n_dying * B_ + dead_total(t) <= budget) {
        for (QueueId q : dying) {
          dying_total += B_;
          die(q, t, B_);
        }
        sent += n_dying;
      } else {
        for (QueueId q : dying) marks_.add(q, 1);
        Fill f = fill(t, n_dying, budget);
        auto plus = remainder_rule(f, RemainderOrder::LowestIdFirst);
        for (QueueId q : dying) marks_.add(q, -1);
        restore_clipped(f, t, plus);
        for (QueueId q : dying) {
          Count v = f.level + (plus(q) ? 1 : 0);
          dying_total += v;
          if (v > 0) ++sent;
          die(q, t, v);
        }
      }
      sent += n_live;
      row.total_occupancy = std::min(B_, virtual_total);
    } else {
      const Count dead_before = dead_total(t);
      Count budget = B_ - n_live - dead_before;
      if (budget < 0)
        throw ContractError("staircase-offline: dead and live queues overflow the buffer at slot " +
                            std::to_string(t));
      Count taken = 0;
      for (auto it = dying.rbegin(); it != dying.rend(); ++it) {
        Count v = std::min(accept_, budget);
        budget -= v;
        taken += v;
        dying_total += v;
        if (v > 0) ++sent;
        die(*it, t, v);
      }
      sent += n_live;
      row.total_occupancy = n_live > 0 ? std::min(B_, virtual_total) : dead_before + taken;
    }
    receivers_ -= n_dying;

    // Dead queues inserted on this slot are counted too; none of them is empty.
    sent += dead_count_ - dying_nonempty(dying);
    row.transmitted = sent;
    if (n_dying > 0) row.dying_acceptance = dying_total;
    row.dropped = virtual_total - row.total_occupancy;
    finish_row(row);
  }

  Count dying_nonempty(const std::vector<QueueId>& dying) const {
    Count n = 0;
    for (QueueId q : dying)
      if (empty_at_[static_cast<std::size_t>(q)] >= 0) ++n;
    return n;
  }

  void drain(Slot t) {
    SlotTrace row;
    row.slot = t;
    row.total_occupancy = dead_total(t);
    row.transmitted = dead_count_;
    finish_row(row);
  }

  const QueueTimeline& tl_;
  Count B_;
  TimelinePolicy policy_;
  const TimelineRunOptions& opt_;
  Fenwick marks_;
  std::vector<Slot> empty_at_;
  std::vector<Slot> died_;
  std::map<Slot, std::vector<QueueId>> groups_;
  Count dead_count_ = 0;
  __int128 dead_sum_ = 0;
  Count receivers_ = 0;
  Count carried_ = 0;
  Count accept_ = 0;
  std::vector<std::pair<Slot, QueueId>> births_, deaths_;
  std::size_t next_birth_ = 0, next_death_ = 0;
  BufferState empty_;
  SimulationResult result_;
};

}  // namespace

SimulationResult run_timeline(const QueueTimeline& timeline, Count buffer_size, TimelinePolicy policy,
                              const TimelineRunOptions& options) {
  if (buffer_size < 1) throw InputError("buffer size B must be at least 1");
  for (const auto& q : timeline.queues())
    if (q.initial_load > buffer_size) throw InputError("initial load of queue " + std::to_string(q.id) + " exceeds B");
  TimelineRun run(timeline, buffer_size, policy, options);
  return run.run();
}

}  // namespace swmsim
