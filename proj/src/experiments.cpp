#include "swmsim/experiments.hpp"

#include <cmath>
#include <map>

namespace swmsim {

double per_slot_rate(const SimulationResult& result, Slot from, Slot to) {
  if (to <= from) throw InputError("empty measurement window");
  Count sent = 0;
  for (const auto& row : result.slots)
    if (row.slot >= from && row.slot < to) sent += row.transmitted;
  return static_cast<double>(sent) / static_cast<double>(to - from);
}

StaircaseRates staircase_rates(const StaircaseParams& params, RemainderOrder order) {
  StaircaseRates out;
  out.params = params;
  out.h = params.h();
  out.p = params.p();
  const Slot warmup = params.a + out.h;
  if (params.horizon <= warmup) throw InputError("horizon too short for a warm-up of a+h slots");
  QueueTimeline tl = staircase_instance(params);

  TimelineRunOptions opt;
  opt.order = order;
  opt.record_dead_transmissions = false;
  out.lqd_rate = per_slot_rate(run_timeline(tl, params.B, TimelinePolicy::Lqd, opt), warmup, params.horizon);
  out.offline_rate =
      per_slot_rate(run_timeline(tl, params.B, TimelinePolicy::StaircaseOffline, opt), warmup, params.horizon);
  out.ratio = out.offline_rate / out.lqd_rate;
  out.formula = static_cast<double>(params.a + out.p) / static_cast<double>(params.a + out.h);
  const double C = static_cast<double>(params.a) / std::sqrt(static_cast<double>(params.B));
  out.limit = (C + std::sqrt(2.0)) / std::sqrt(C * C + 2);
  return out;
}

PhiKComparison compare_on_phi_k(std::int64_t k, Count B, std::int64_t cycles, std::int64_t warmup_cycles,
                                std::int64_t tail_cycles, RemainderOrder order) {
  if (warmup_cycles < 0 || tail_cycles < 0 || warmup_cycles + tail_cycles >= cycles)
    throw InputError("warm-up and tail cycles must leave at least one measured cycle");
  PhiKComparison out{k, B, cycles, warmup_cycles, tail_cycles};
  QueueTimeline tl = phi_k_instance({k, B, cycles});
  TimelineRunOptions opt;
  opt.record_dead_transmissions = false;
  opt.order = order;
  SimulationResult lqd = run_timeline(tl, B, TimelinePolicy::Lqd, opt);
  SimulationResult late = run_timeline(tl, B, TimelinePolicy::LateQdAggregate, opt);
  out.lqd_total = lqd.total_transmitted;
  out.lateqd_total = late.total_transmitted;
  const Slot from = warmup_cycles * k + 1, to = (cycles - tail_cycles) * k + 1;
  out.lqd_steady = per_slot_rate(lqd, from, to);
  out.lateqd_steady = per_slot_rate(late, from, to);
  return out;
}

std::vector<DeadTraceRow> phi_k_dead_trace(std::int64_t k, Count B, std::int64_t cycles) {
  QueueTimeline tl = phi_k_instance({k, B, cycles});
  std::map<QueueId, DeadTraceRow> rows;
  TimelineRunOptions opt;
  opt.record_slots = false;
  opt.on_death = [&](QueueId q, Slot t, Count kept) {
    auto& r = rows[q];
    r.queue = q;
    r.dying_slot = t;
    r.lqd_accepted = kept;
    // The dying slot's own transmission; dead transmissions are added below.
    r.lqd_sent_after = kept > 0 ? 1 : 0;
  };
  SimulationResult lqd = run_timeline(tl, B, TimelinePolicy::Lqd, opt);
  for (const auto& [q, n] : lqd.dead_transmissions) rows[q].lqd_sent_after += n;

  TimelineRunOptions late_opt;
  late_opt.record_slots = false;
  late_opt.record_dead_transmissions = false;
  late_opt.on_death = [&](QueueId q, Slot, Count kept) { rows[q].lateqd_accepted = kept; };
  run_timeline(tl, B, TimelinePolicy::LateQdAggregate, late_opt);

  std::vector<DeadTraceRow> out;
  out.reserve(rows.size());
  for (const auto& [q, r] : rows) out.push_back(r);
  return out;
}

}  // namespace swmsim
