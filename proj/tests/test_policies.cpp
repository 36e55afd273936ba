#include <doctest.h>

#include <algorithm>
#include <functional>
#include <stack>

#include "helpers.hpp"
#include "swmsim/brute_force.hpp"
#include "swmsim/regularity.hpp"

using namespace swmsim;
using testing::run;

namespace {

BufferState state_of(const std::vector<Count>& v) {
  BufferState s;
  for (std::size_t i = 0; i < v.size(); ++i) s.set(static_cast<QueueId>(i + 1), v[i]);
  return s;
}

std::vector<Count> dense(const BufferState& s, std::size_t n) {
  std::vector<Count> out(n, 0);
  for (const auto& [q, v] : s) out[static_cast<std::size_t>(q - 1)] = v;
  return out;
}

// Among all ways to keep exactly B packets, the one whose occupancies sorted
// in descending order are lexicographically smallest.
std::vector<Count> flattest_by_enumeration(const std::vector<Count>& v, Count B) {
  std::vector<Count> best_sorted;
  std::vector<Count> cur(v.size(), 0);
  std::function<void(std::size_t, Count)> rec = [&](std::size_t i, Count left) {
    if (i == v.size()) {
      if (left != 0) return;
      auto s = cur;
      std::sort(s.begin(), s.end(), std::greater<>());
      if (best_sorted.empty() || s < best_sorted) best_sorted = s;
      return;
    }
    for (Count x = 0; x <= std::min(v[i], left); ++x) {
      cur[i] = x;
      rec(i + 1, left - x);
    }
  };
  rec(0, B);
  return best_sorted;
}

// Unbounded LIFO service slot by slot, all queues at once.
std::map<std::pair<QueueId, Slot>, std::vector<Slot>> exits_by_replay(const ArrivalSchedule& s) {
  std::map<QueueId, std::stack<std::pair<Slot, std::size_t>>> stacks;
  std::map<std::pair<QueueId, Slot>, std::vector<Slot>> out;
  for (Slot t = 0; t <= s.horizon() + s.total(); ++t) {
    for (const Arrival& a : s.at(t)) {
      out[{a.queue, t}].resize(static_cast<std::size_t>(a.count));
      for (Count i = 0; i < a.count; ++i) stacks[a.queue].push({t, static_cast<std::size_t>(i)});
    }
    for (auto& [q, st] : stacks) {
      if (st.empty()) continue;
      auto [slot, i] = st.top();
      st.pop();
      out[{q, slot}][i] = t;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("integral water fill") {
  CHECK(dense(water_fill(state_of({6, 7, 5}), 12), 3) == std::vector<Count>{4, 4, 4});
  CHECK(flattest_by_enumeration({6, 7, 5}, 12) == std::vector<Count>{4, 4, 4});
  CHECK(dense(water_fill(state_of({2, 1, 3}), 10), 3) == std::vector<Count>{2, 1, 3});
  // Level 2 leaves one packet over: lowest id first, or highest with the flag.
  CHECK(dense(water_fill(state_of({5, 5, 5}), 7), 3) == std::vector<Count>{3, 2, 2});
  CHECK(dense(water_fill(state_of({5, 5, 5}), 7, RemainderOrder::HighestIdFirst), 3) ==
        std::vector<Count>{2, 2, 3});
  CHECK(dense(water_fill(state_of({1, 9, 5}), 7), 3) == std::vector<Count>{1, 3, 3});
}

TEST_CASE("integral water fill matches enumeration on small inputs") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> n_dist(1, 4);
  std::uniform_int_distribution<Count> v_dist(0, 6), b_dist(1, 10);
  for (int it = 0; it < 400; ++it) {
    std::vector<Count> v(static_cast<std::size_t>(n_dist(rng)));
    for (auto& x : v) x = v_dist(rng);
    Count B = b_dist(rng);
    Count total = 0;
    for (Count x : v) total += x;
    for (auto order : {RemainderOrder::LowestIdFirst, RemainderOrder::HighestIdFirst}) {
      auto out = dense(water_fill(state_of(v), B, order), v.size());
      if (total <= B) {
        CHECK(out == v);
        continue;
      }
      auto sorted = out;
      std::sort(sorted.begin(), sorted.end(), std::greater<>());
      CHECK(sorted == flattest_by_enumeration(v, B));
      for (std::size_t i = 0; i < v.size(); ++i) CHECK(out[i] <= v[i]);
    }
  }
}

TEST_CASE("fractional water fill") {
  auto frac = [](const std::vector<Count>& v) {
    FractionalBufferState s;
    for (std::size_t i = 0; i < v.size(); ++i) s.set(static_cast<QueueId>(i + 1), Rational(v[i]));
    return s;
  };
  auto a = water_fill(frac({6, 7, 5}), 12);
  for (QueueId q = 1; q <= 3; ++q) CHECK(a.get(q) == 4);
  auto b = water_fill(frac({1, 10}), 6);
  CHECK(b.get(1) == 1);
  CHECK(b.get(2) == 5);
  auto c = water_fill(frac({3, 3, 1}), 6);
  CHECK(c.get(1) == Rational(5, 2));
  CHECK(c.get(3) == 1);

  std::mt19937_64 rng(9);
  std::uniform_int_distribution<Count> v_dist(0, 20), b_dist(1, 30);
  for (int it = 0; it < 200; ++it) {
    std::vector<Count> v(5);
    for (auto& x : v) x = v_dist(rng);
    Count B = b_dist(rng);
    auto out = water_fill(frac(v), B);
    Rational total = out.total();
    Rational vt(0);
    for (Count x : v) vt += x;
    CHECK(total == (vt < B ? vt : Rational(B)));
    // Every clipped queue sits at the same level, above every unclipped one.
    std::optional<Rational> level;
    for (std::size_t i = 0; i < v.size(); ++i) {
      Rational o = out.get(static_cast<QueueId>(i + 1));
      if (o < v[i]) {
        if (level) CHECK(o == *level);
        level = o;
      }
    }
    if (level)
      for (std::size_t i = 0; i < v.size(); ++i)
        if (out.get(static_cast<QueueId>(i + 1)) == v[i]) CHECK(Rational(v[i]) <= *level);
  }
}

TEST_CASE("exit times") {
  auto ex = compute_exit_times(testing::lifo_example());
  auto q1 = ex.exits(1, 1);
  std::vector<Slot> got(q1.begin(), q1.end());
  std::sort(got.begin(), got.end());
  CHECK(got == std::vector<Slot>{1, 6, 7, 8});

  ArrivalSchedule one(3);
  one.add(1, 1, 1);
  CHECK(compute_exit_times(one).exits(1, 1)[0] == 1);
  ArrivalSchedule two(3);
  two.add(1, 1, 2);
  auto e = compute_exit_times(two).exits(1, 1);
  CHECK(std::vector<Slot>(e.begin(), e.end()) == std::vector<Slot>{2, 1});

  CHECK_THROWS_WITH_AS(compute_exit_times(testing::lifo_example(), 5), doctest::Contains("aggregate"), InputError);

  std::mt19937_64 rng(21);
  for (int it = 0; it < 100; ++it) {
    Count B = 0;
    auto s = testing::random_schedule(rng, {}, B);
    auto map = compute_exit_times(s);
    CHECK(map.all() == exits_by_replay(s));
    // Within a queue, later arrivals never leave after packets beneath them.
    for (const auto& [key, ex] : map.all()) {
      for (std::size_t i = 1; i < ex.size(); ++i) CHECK(ex[i] < ex[i - 1]);
      for (Slot x : ex) CHECK(x >= key.second);
    }
  }
}

TEST_CASE("packet LateQD keeps the packets that leave earliest") {
  auto s = testing::lifo_example();
  LateQdPolicy p;
  p.prepare(s);
  Switch sw(SwitchConfig{4, 3}, p);
  for (Slot t = 0; t <= 2; ++t) {
    sw.arrive(s.at(t));
    if (t == 2) {
      CHECK(p.buffered_exits(1) == std::vector<Slot>{2, 3, 4});
      CHECK(p.buffered_exits(2) == std::vector<Slot>{2});
      CHECK(p.buffered_exits(3).empty());
    }
    auto l = liveness_at(s, t);
    sw.transmit(l.dying, l.live_count);
  }
}

TEST_CASE("LateQD on the three-queue staircase is optimal") {
  // Exhaustive search over regular strategies gives 18 for this instance.
  auto s = testing::three_queue_staircase();
  const Count opt = brute_force_opt(s, 6, {100, 5, 8});
  CHECK(opt == 18);
  CHECK(run(s, "lateqd", 6).total_transmitted == opt);
  CHECK(run(s, "lateqd-aggregate", 6).total_transmitted == opt);
  std::vector<Count> per_slot;
  for (const auto& row : run(s, "lateqd", 6).slots) per_slot.push_back(row.transmitted);
  CHECK(per_slot == std::vector<Count>{0, 1, 2, 3, 3, 3, 2, 1, 1, 1, 1});
}

TEST_CASE("no overflow admits everything") {
  ArrivalSchedule s(10);
  s.add(1, 1, 3);
  s.add(1, 2, 4);
  s.add(2, 3, 2);
  for (const auto& name : {"lqd", "lateqd", "brute-force"}) {
    auto r = run(s, name, 10);
    CHECK(r.total_transmitted == 9);
    CHECK(r.total_dropped == 0);
  }
  CHECK(brute_force_opt(s, 10) == 9);
}

TEST_CASE("phi-4 with two cycles: LQD 31, LateQD 32") {
  auto s = expand(phi_k_instance({4, 6, 2}), SwitchConfig{6, std::nullopt}, 6);
  CHECK(run(s, "lqd", 6).total_transmitted == 31);
  CHECK(run(s, "lateqd-aggregate", 6).total_transmitted == 32);
  CHECK(run(s, "lateqd", 6).total_transmitted == 32);
}

TEST_CASE("brute force") {
  ArrivalSchedule scaled(3);
  scaled.add(1, 1, 3);
  scaled.add(2, 2, 3);
  scaled.add(3, 3, 3);
  CHECK(brute_force_opt(scaled, 3) == run(scaled, "lateqd", 3).total_transmitted);

  ArrivalSchedule single(5);
  single.add(1, 1, 4);
  CHECK(brute_force_opt(single, 5) == 4);

  ArrivalSchedule big(5);
  for (Slot t = 1; t <= 6; ++t) big.add(t, 1, 5);
  CHECK_THROWS_AS(brute_force_opt(big, 5), InputError);

  // The policy replays an optimal path.
  auto s = testing::three_queue_staircase();
  BruteForcePolicy p({100, 5, 8});
  CHECK(run(s, p, 6, true).total_transmitted == 18);
}

TEST_CASE("LateQD matches brute force and dominates LQD on random instances") {
  std::mt19937_64 rng(2024);
  for (int it = 0; it < 250; ++it) {
    Count B = 0;
    auto s = testing::random_schedule(rng, {}, B);
    Count opt = brute_force_opt(s, B);
    auto late = run(s, "lateqd", B, true);
    INFO("instance " << it << " B=" << B);
    CHECK(late.total_transmitted == opt);
    auto lqd = run(s, "lqd", B, true);
    CHECK(late.total_transmitted >= lqd.total_transmitted);
    auto frac = testing::run_fractional(s, B, true);
    CHECK(Rational(late.total_transmitted) >= frac.total_transmitted);
    CHECK(check_regularity(late, s, B).empty());
    CHECK(check_regularity(lqd, s, B).empty());
    CHECK(check_regularity(frac, s, B).empty());
    auto bf = run(s, "brute-force", B, true);
    CHECK(bf.total_transmitted == opt);
    CHECK(check_regularity(bf, s, B).empty());
  }
}

TEST_CASE("aggregate LateQD matches the packet form on timeline instances") {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<Count> b_dist(1, 5);
  for (int it = 0; it < 200; ++it) {
    Count B = b_dist(rng);
    auto tl = testing::random_timeline(rng, 4, B, 6);
    auto s = expand(tl, SwitchConfig{B, std::nullopt}, B);
    auto packet = run(s, "lateqd", B);
    auto agg = run(s, "lateqd-aggregate", B, true);
    INFO("instance " << it << " B=" << B);
    CHECK(agg.total_transmitted == packet.total_transmitted);
    CHECK(check_regularity(agg, s, B).empty());
  }
  ArrivalSchedule raw(4);
  raw.add(1, 1, 2);
  CHECK_THROWS_AS(run(raw, "lateqd-aggregate", 4), InputError);
}

TEST_CASE("staircase parameters") {
  auto by_enumeration = [](Count B, Count a) {
    Count h = 0, p = 0;
    for (Count w = 0; w <= B; ++w) {
      if (a * w + w * (w + 1) / 2 <= B) h = w;
      if (w * (w + 1) / 2 <= B - a) p = w;
    }
    return std::pair{h, p};
  };
  CHECK(staircase_h(100, 10) == 7);
  CHECK(staircase_p(100, 10) == 12);
  for (Count B = 2; B <= 300; B += 7)
    for (Count a = 1; a < B && a <= 40; a += 3) {
      auto [h, p] = by_enumeration(B, a);
      CHECK(staircase_h(B, a) == h);
      CHECK(staircase_p(B, a) == p);
    }
  CHECK(staircase_h(Count{1} << 62, 1) > 0);
}

TEST_CASE("staircase offline policy sends a+p per slot in steady state") {
  for (auto [B, a] : std::vector<std::pair<Count, Count>>{{100, 10}, {60, 4}, {300, 12}}) {
    auto params = StaircaseParams::with_default_horizon(B, a);
    auto s = expand(staircase_instance(params), SwitchConfig{B, std::nullopt}, B);
    StaircaseOfflinePolicy alg;
    auto r = run(s, alg, B, true);
    const Count p = staircase_p(B, a);
    CHECK(alg.accept() == p);
    for (const auto& row : r.slots)
      if (row.slot >= p && row.slot < params.horizon) CHECK(row.transmitted == a + p);
    CHECK(check_regularity(r, s, B).empty());
    CHECK(run(s, "lateqd-aggregate", B).total_transmitted >= r.total_transmitted);
  }
  auto phi = expand(phi_k_instance({4, 6, 2}), SwitchConfig{6, std::nullopt}, 6);
  CHECK_THROWS_AS(run(phi, "staircase-offline", 6), InputError);
}
