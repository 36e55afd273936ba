#include "doctest.h"

#include <random>

#include "helpers.hpp"
#include "swmsim/timeline_engine.hpp"

using namespace testing;

namespace {

const char* label(TimelinePolicy p) {
  switch (p) {
    case TimelinePolicy::Lqd: return "lqd";
    case TimelinePolicy::LateQdAggregate: return "lateqd-aggregate";
    case TimelinePolicy::StaircaseOffline: return "staircase-offline";
  }
  return "?";
}

SimulationResult reference(const QueueTimeline& tl, Count B, TimelinePolicy p, RemainderOrder order) {
  ArrivalSchedule s = expand(tl, SwitchConfig{B, std::nullopt}, 0);
  if (p == TimelinePolicy::Lqd) {
    LqdPolicy lqd(order);
    return run(s, lqd, B);
  }
  return run(s, label(p), B);
}

void same(const SimulationResult& fast, const SimulationResult& ref) {
  CHECK(fast.total_transmitted == ref.total_transmitted);
  CHECK(fast.total_arrivals == ref.total_arrivals);
  CHECK(fast.total_dropped == ref.total_dropped);
  CHECK(fast.dead_transmissions == ref.dead_transmissions);
  REQUIRE(fast.slots.size() == ref.slots.size());
  for (std::size_t i = 0; i < ref.slots.size(); ++i) {
    const auto& a = fast.slots[i];
    const auto& b = ref.slots[i];
    INFO("slot " << b.slot);
    CHECK(a.slot == b.slot);
    CHECK(a.transmitted == b.transmitted);
    CHECK(a.dying_acceptance == b.dying_acceptance);
    CHECK(a.live_count == b.live_count);
    CHECK(a.total_occupancy == b.total_occupancy);
    CHECK(a.dropped == b.dropped);
  }
}

}  // namespace

TEST_CASE("timeline engine matches the slot engine for lqd on random timelines") {
  std::mt19937_64 rng(11);
  for (int iter = 0; iter < 400; ++iter) {
    Count B = std::uniform_int_distribution<Count>(1, 9)(rng);
    QueueTimeline tl = random_timeline(rng, 7, B, 9);
    for (auto order : {RemainderOrder::LowestIdFirst, RemainderOrder::HighestIdFirst}) {
      INFO("iter " << iter << " B " << B);
      TimelineRunOptions opt;
      opt.order = order;
      same(run_timeline(tl, B, TimelinePolicy::Lqd, opt), reference(tl, B, TimelinePolicy::Lqd, order));
    }
  }
}

TEST_CASE("timeline engine matches the slot engine for lateqd-aggregate when it applies") {
  std::mt19937_64 rng(12);
  int compared = 0;
  for (int iter = 0; iter < 600; ++iter) {
    Count B = std::uniform_int_distribution<Count>(1, 12)(rng);
    QueueTimeline tl = random_timeline(rng, 6, B, 8);
    SimulationResult fast;
    try {
      fast = run_timeline(tl, B, TimelinePolicy::LateQdAggregate);
    } catch (const ContractError&) {
      continue;  // more nonempty queues than B: outside the fast path
    }
    ++compared;
    INFO("iter " << iter << " B " << B);
    same(fast, reference(tl, B, TimelinePolicy::LateQdAggregate, RemainderOrder::LowestIdFirst));
  }
  CHECK(compared > 300);
}

TEST_CASE("timeline engine matches the slot engine on phi_k") {
  for (std::int64_t k : {2, 3, 5}) {
    for (Count B : {Count(k * (k + 1) / 2), Count(k * k), Count(3 * k + 1)}) {
      QueueTimeline tl = phi_k_instance({k, B, 3});
      INFO("k " << k << " B " << B);
      same(run_timeline(tl, B, TimelinePolicy::Lqd), reference(tl, B, TimelinePolicy::Lqd, RemainderOrder::LowestIdFirst));
      same(run_timeline(tl, B, TimelinePolicy::LateQdAggregate),
           reference(tl, B, TimelinePolicy::LateQdAggregate, RemainderOrder::LowestIdFirst));
    }
  }
}

TEST_CASE("timeline engine matches the slot engine on staircases") {
  for (Count a : {1, 2, 4, 7}) {
    for (Count B : {a + 1, a + 5, 3 * a + 10, staircase_exact_buffer(a, 6), staircase_exact_buffer(a, 6) + 3}) {
      auto params = StaircaseParams::with_default_horizon(B, a);
      QueueTimeline tl = staircase_instance(params);
      INFO("a " << a << " B " << B);
      for (auto order : {RemainderOrder::LowestIdFirst, RemainderOrder::HighestIdFirst}) {
        TimelineRunOptions opt;
        opt.order = order;
        same(run_timeline(tl, B, TimelinePolicy::Lqd, opt), reference(tl, B, TimelinePolicy::Lqd, order));
      }
      same(run_timeline(tl, B, TimelinePolicy::StaircaseOffline),
           reference(tl, B, TimelinePolicy::StaircaseOffline, RemainderOrder::LowestIdFirst));
      try {
        auto fast = run_timeline(tl, B, TimelinePolicy::LateQdAggregate);
        same(fast, reference(tl, B, TimelinePolicy::LateQdAggregate, RemainderOrder::LowestIdFirst));
      } catch (const ContractError&) {
      }
    }
  }
}

TEST_CASE("death callback reports the kept packets of every dying queue") {
  auto params = StaircaseParams::with_default_horizon(staircase_exact_buffer(3, 5), 3);
  QueueTimeline tl = staircase_instance(params);
  std::map<Slot, Count> seen;
  TimelineRunOptions opt;
  opt.on_death = [&](QueueId, Slot t, Count kept) { seen[t] += kept; };
  auto r = run_timeline(tl, params.B, TimelinePolicy::Lqd, opt);
  for (const auto& row : r.slots)
    if (row.dying_acceptance) CHECK(seen[row.slot] == *row.dying_acceptance);
}

TEST_CASE("timeline engine handles a large staircase without expanding it") {
  auto params = StaircaseParams::from_c(100'000'000, 1.0);
  params.horizon = 200;
  QueueTimeline tl = staircase_instance(params);
  TimelineRunOptions opt;
  opt.record_slots = false;
  auto r = run_timeline(tl, params.B, TimelinePolicy::Lqd, opt);
  CHECK(r.total_transmitted > 0);
  CHECK(r.total_transmitted + r.total_dropped == r.total_arrivals);
}
