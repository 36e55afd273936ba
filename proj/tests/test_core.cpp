#include <doctest.h>

#include "helpers.hpp"
#include "swmsim/regularity.hpp"

using namespace swmsim;
using testing::run;

namespace {

// Returns a fixed state on one slot and admits like LQD otherwise.
class ScriptedPolicy : public PushOutPolicy {
 public:
  ScriptedPolicy(Slot when, BufferState out) : when_(when), out_(std::move(out)) {}
  std::string name() const override { return "scripted"; }
  BufferState admit(const SlotView& view) override {
    if (view.slot == when_) return out_;
    return lqd_.admit(view);
  }

 private:
  Slot when_;
  BufferState out_;
  LqdPolicy lqd_;
};

}  // namespace

TEST_CASE("schedule accumulates and bounds per-slot counts") {
  ArrivalSchedule s(5);
  s.add(2, 7, 2);
  s.add(2, 7, 3);
  CHECK(s.count(2, 7) == 5);
  CHECK(s.horizon() == 2);
  CHECK_THROWS_AS(s.add(2, 7, 1), InputError);
  CHECK_THROWS_AS(s.add(-1, 1, 1), InputError);
  CHECK(s.total() == 5);
}

TEST_CASE("expand places B arrivals on every live slot") {
  auto s = testing::three_queue_staircase();
  CHECK(s.horizon() == 6);
  CHECK(s.count(1, 1) == 6);
  CHECK(s.count(2, 1) == 6);
  CHECK(s.count(3, 1) == 0);
  for (Slot t = 2; t <= 4; ++t) CHECK(s.count(t, 2) == 6);
  for (Slot t = 3; t <= 6; ++t) CHECK(s.count(t, 3) == 6);
  CHECK(s.total() == 6 * 9);
}

TEST_CASE("empty timeline expands to an empty schedule") {
  auto s = expand(QueueTimeline{}, SwitchConfig{3, std::nullopt}, 3);
  CHECK(s.empty());
  CHECK(s.horizon() == 0);
}

TEST_CASE("initial loads become slot-0 arrivals") {
  QueueTimeline tl;
  tl.add({1, 1, 0, 2});
  tl.add({2, 2, 3, 4});
  auto s = expand(tl, SwitchConfig{5, std::nullopt}, 5);
  CHECK(s.count(0, 1) == 2);
  CHECK(s.count(0, 2) == 4);
  CHECK(s.count(2, 2) == 5);
  CHECK_FALSE(s.receives(1, 2));
  QueueTimeline bad;
  CHECK_THROWS_AS(bad.add({3, 0, 2, 1}), InputError);
}

TEST_CASE("phi-k intervals follow the cycle formula") {
  auto tl = phi_k_instance({4, 6, 2});
  auto s = expand(tl, SwitchConfig{6, std::nullopt}, 6);
  for (QueueId j = 1; j <= 8; ++j)
    for (Slot t = 0; t <= 9; ++t) {
      bool expected = t >= 4 * ((j - 1) / 4) + 1 && t <= j;
      CHECK(s.receives(t, j) == expected);
    }
  auto two = phi_k_instance({2, 1, 1});
  REQUIRE(two.queues().size() == 2);
  CHECK(two.queues()[0].begin == 1);
  CHECK(two.queues()[0].end == 1);
  CHECK(two.queues()[1].begin == 1);
  CHECK(two.queues()[1].end == 2);
}

TEST_CASE("bounded queue count recycles ids after the drain gap") {
  auto tl = phi_k_instance({2, 3, 6});
  auto s = expand(tl, SwitchConfig{3, 5}, 3);
  // Each slot still has the same receiver count as the unbounded expansion.
  auto u = expand(tl, SwitchConfig{3, std::nullopt}, 3);
  for (Slot t = 0; t <= u.horizon(); ++t) CHECK(s.at(t).size() == u.at(t).size());
  for (QueueId q : s.queues()) CHECK(q <= 5);
  CHECK(s.total() == u.total());
  CHECK_THROWS_WITH_AS(expand(tl, SwitchConfig{3, 4}, 3), doctest::Contains("no free queue at slot"), InputError);
}

TEST_CASE("liveness reads the next slot") {
  auto s = testing::three_queue_staircase();
  auto l2 = liveness_at(s, 2);
  CHECK(l2.dying == std::vector<QueueId>{1});
  CHECK(l2.live_count == 1);
  auto l6 = liveness_at(s, 6);
  CHECK(l6.dying == std::vector<QueueId>{3});
  CHECK(l6.live_count == 0);
}

TEST_CASE("engine rejects states that break the contract") {
  ArrivalSchedule s(3);
  s.add(1, 1, 2);
  BufferState too_many;
  too_many.set(1, 3);
  ScriptedPolicy a(1, too_many);
  CHECK_THROWS_AS(run(s, a, 3), ContractError);

  ArrivalSchedule s2(3);
  s2.add(1, 1, 3);
  s2.add(1, 2, 3);
  BufferState over;
  over.set(1, 3);
  over.set(2, 1);
  ScriptedPolicy b(1, over);
  CHECK_THROWS_WITH_AS(run(s2, b, 3), doctest::Contains("exceeded the buffer"), ContractError);

  BufferState foreign;
  foreign.set(9, 1);
  ScriptedPolicy c(1, foreign);
  CHECK_THROWS_AS(run(s2, c, 3), ContractError);
}

TEST_CASE("zero arrivals transmit nothing") {
  ArrivalSchedule s(4);
  auto r = run(s, "lqd", 4);
  CHECK(r.total_transmitted == 0);
  CHECK(r.slots.empty());
}

TEST_CASE("LQD on the three-queue staircase sends 17") {
  auto r = run(testing::three_queue_staircase(), "lqd", 6, true);
  CHECK(r.total_transmitted == 17);
  // Hand trace: levels 3 on slot 2, 2 on slot 3, then [1,3,2], [2,4], [1,5].
  CHECK(r.dead_transmissions[1] == 2);
  CHECK(r.dead_transmissions[2] == 2);
  CHECK(r.dead_transmissions[3] == 4);
  std::vector<Count> per_slot;
  for (const auto& row : r.slots) per_slot.push_back(row.transmitted);
  CHECK(per_slot == std::vector<Count>{0, 1, 2, 3, 3, 2, 2, 1, 1, 1, 1});
}

TEST_CASE("transmission removes one packet per nonempty queue and conserves packets") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 50; ++i) {
    Count B = 0;
    auto s = testing::random_schedule(rng, {}, B);
    auto r = run(s, "lqd", B, true);
    Count per_slot = 0;
    for (const auto& row : r.slots) {
      per_slot += row.transmitted;
      CHECK(row.total_occupancy <= B);
      for (const auto& [q, v] : *row.after_admission) CHECK(row.after_transmission->get(q) == v - 1);
      CHECK(static_cast<Count>(row.after_admission->nonempty()) == row.transmitted);
    }
    CHECK(per_slot == r.total_transmitted);
    CHECK(r.total_transmitted == r.total_arrivals - r.total_dropped);

    auto f = testing::run_fractional(s, B, true);
    CHECK(f.total_transmitted == f.total_arrivals - f.total_dropped);
    for (const auto& row : f.slots) {
      CHECK(row.total_occupancy <= B);
      for (const auto& [q, v] : *row.after_admission) {
        Rational expect = v > 1 ? Rational(v - 1) : Rational(0);
        CHECK(row.after_transmission->get(q) == expect);
      }
    }
  }
}

TEST_CASE("simulation is deterministic") {
  std::mt19937_64 rng(5);
  Count B = 0;
  auto s = testing::random_schedule(rng, {}, B);
  auto a = run(s, "lateqd", B, true);
  auto b = run(s, "lateqd", B, true);
  REQUIRE(a.slots.size() == b.slots.size());
  for (std::size_t i = 0; i < a.slots.size(); ++i) {
    CHECK(a.slots[i].transmitted == b.slots[i].transmitted);
    CHECK(*a.slots[i].after_admission == *b.slots[i].after_admission);
  }
}

TEST_CASE("regularity checker") {
  auto s = testing::three_queue_staircase();
  auto r = run(s, "lqd", 6, true);
  CHECK(check_regularity(r, s, 6).empty());

  auto idle = r;
  // Pretend queue 1 held on to its packet on slot 1.
  auto& row = idle.slots[1];
  row.after_transmission->set(1, row.after_admission->get(1));
  auto v = check_regularity(idle, s, 6);
  REQUIRE(v.size() >= 1);
  CHECK(v.front().label() == "not work-conserving");
  CHECK(v.front().slot == 1);

  ArrivalSchedule small(4);
  small.add(1, 1, 4);
  BufferState three;
  three.set(1, 3);
  ScriptedPolicy dropper(1, three);
  auto d = run(small, dropper, 4, true);
  auto dv = check_regularity(d, small, 4);
  REQUIRE(dv.size() == 1);
  CHECK(dv.front().label() == "unforced drop");

  auto bare = run(s, "lqd", 6, false);
  CHECK(check_regularity(bare, s, 6).front().label() == "missing snapshot");
}
