// Acceptance run: one PASS/FAIL line per criterion. Criteria that fail for
// reasons recorded in the README are marked "known"; they do not change the
// exit status, but an unexpected result in either direction does.
//
//   acceptance            all criteria
//   acceptance 1 3 4      a subset

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <future>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include "helpers.hpp"
#include "swmsim/brute_force.hpp"
#include "swmsim/experiments.hpp"
#include "swmsim/lp.hpp"
#include "swmsim/regularity.hpp"

using namespace swmsim;
using testing::run;

namespace {

// Tolerances and budgets.
constexpr double kExample1Seconds = 1.0;
constexpr double kOracleSeconds = 60.0;
constexpr double kStaircaseSeconds = 60.0;
constexpr double kStaircaseRelative = 0.02;
constexpr double kLpObjectiveAbs = 1.0;
constexpr double kLpRatioAbs = 1e-3;
constexpr double kSolverAgreement = 1e-6;
constexpr double kResidual = 1e-6;
constexpr double kPeakLow = 1.440, kPeakHigh = 1.451;
// Allowed dip against the trend when judging the sweep profile single-peaked.
constexpr double kProfileNoise = 5e-4;
constexpr std::int64_t kSweepCycles = 200, kSweepWarmup = 100, kSweepTail = 1;
constexpr int kRandomInstances = 250;

const std::set<int> kKnownFailures{1, 5, 6, 7};

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x, int prec = 6) {
  std::ostringstream os;
  os.precision(prec);
  os << std::fixed << x;
  return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SimulationResult run_snap(const ArrivalSchedule& s, PushOutPolicy& p, Count B) { return run(s, p, B, true); }

// Randomized corpus shared by criteria 2 and 7.
struct Corpus {
  std::vector<std::pair<ArrivalSchedule, Count>> raw;
  std::vector<std::pair<QueueTimeline, Count>> timelines;
};

const Corpus& corpus() {
  static const Corpus c = [] {
    Corpus out;
    std::mt19937_64 rng(20240611);
    for (int i = 0; i < kRandomInstances; ++i) {
      Count B = 0;
      auto s = testing::random_schedule(rng, {}, B);
      out.raw.emplace_back(std::move(s), B);
    }
    // timeline instances small enough for the brute force
    std::uniform_int_distribution<Count> bdist(1, 3);
    while (out.timelines.size() < 120) {
      Count B = bdist(rng);
      auto tl = testing::random_timeline(rng, 3, B, 4);
      if (expand(tl, SwitchConfig{B, std::nullopt}, B).total() <= 24) out.timelines.emplace_back(tl, B);
    }
    return out;
  }();
  return c;
}

Verdict criterion1() {
  auto t0 = std::chrono::steady_clock::now();
  auto fig3 = testing::three_queue_staircase();
  auto phi = expand(phi_k_instance({4, 6, 2}), SwitchConfig{6, std::nullopt}, 6);
  const Count f_lqd = run(fig3, "lqd", 6).total_transmitted;
  const Count f_late = run(fig3, "lateqd", 6).total_transmitted;
  const Count f_agg = run(fig3, "lateqd-aggregate", 6).total_transmitted;
  const Count p_lqd = run(phi, "lqd", 6).total_transmitted;
  const Count p_late = run(phi, "lateqd", 6).total_transmitted;
  const Count p_agg = run(phi, "lateqd-aggregate", 6).total_transmitted;
  const Count f_opt = brute_force_opt(fig3, 6, {100, 5, 8});
  const double sec = seconds_since(t0);
  Verdict v;
  v.pass = f_lqd == 17 && f_late == 19 && f_agg == 19 && p_lqd == 31 && p_late == 32 && p_agg == 32 &&
           sec < kExample1Seconds;
  v.detail = "fig3 LQD " + std::to_string(f_lqd) + "/17, LateQD " + std::to_string(f_late) + " (aggregate " +
             std::to_string(f_agg) + ")/19, brute-force optimum " + std::to_string(f_opt) + "; phi_4 LQD " +
             std::to_string(p_lqd) + "/31, LateQD " + std::to_string(p_late) + " (aggregate " +
             std::to_string(p_agg) + ")/32; " + fmt(sec, 3) + " s";
  return v;
}

Verdict criterion2() {
  auto t0 = std::chrono::steady_clock::now();
  const Corpus& c = corpus();
  int mismatch = 0, agg_checked = 0, agg_mismatch = 0;
  for (const auto& [s, B] : c.raw) {
    const Count opt = brute_force_opt(s, B);
    if (run(s, "lateqd", B).total_transmitted != opt) ++mismatch;
    try {
      Count agg = run(s, "lateqd-aggregate", B).total_transmitted;
      ++agg_checked;
      if (agg != opt) ++agg_mismatch;
    } catch (const InputError&) {
      // not in timeline form
    }
  }
  for (const auto& [tl, B] : c.timelines) {
    auto s = expand(tl, SwitchConfig{B, std::nullopt}, B);
    const Count opt = brute_force_opt(s, B);
    if (run(s, "lateqd", B).total_transmitted != opt) ++mismatch;
    ++agg_checked;
    if (run(s, "lateqd-aggregate", B).total_transmitted != opt) ++agg_mismatch;
  }
  const double sec = seconds_since(t0);
  Verdict v;
  v.pass = mismatch == 0 && agg_mismatch == 0 && sec < kOracleSeconds;
  v.detail = std::to_string(c.raw.size() + c.timelines.size()) + " instances, LateQD mismatches " +
             std::to_string(mismatch) + ", aggregate checked on " + std::to_string(agg_checked) + " with " +
             std::to_string(agg_mismatch) + " mismatches; " + fmt(sec, 2) + " s";
  return v;
}

Verdict criterion3() {
  const Count a = 10, h = 7, B = staircase_exact_buffer(a, h);
  const Slot window = 4 * (a + h);
  StaircaseParams p{B, a, window + 1, true};
  auto s = expand(staircase_instance(p), SwitchConfig{B, std::nullopt}, 0);
  int bad = 0;
  Slot slots = 0;
  for (auto order : {RemainderOrder::LowestIdFirst, RemainderOrder::HighestIdFirst}) {
    LqdPolicy lqd(order);
    auto r = run_snap(s, lqd, B);
    for (const auto& row : r.slots) {
      const Slot t = row.slot;
      if (t > window) break;
      ++slots;
      const auto& after = *row.after_admission;
      for (QueueId j = 1; j <= t + h; ++j)
        if (after.get(j) != std::max<Count>(0, j - t)) ++bad;
      for (QueueId j = t + h + 1; j <= t + h + a; ++j) {
        Count x = after.get(j);
        if (x != h && x != h + 1) ++bad;
      }
    }
  }
  Verdict v;
  v.pass = bad == 0;
  v.detail = "a=10 h=7 B=98, " + std::to_string(slots) + " slot checks over both tie-break orders, " +
             std::to_string(bad) + " mismatches";
  return v;
}

Verdict criterion4() {
  auto t0 = std::chrono::steady_clock::now();
  const double root2 = std::sqrt(2.0);
  std::vector<double> ratios;
  std::string detail;
  for (Count B : {Count(10'000), Count(1'000'000), Count(100'000'000)}) {
    auto r = staircase_rates(StaircaseParams::exact_near(B, root2));
    ratios.push_back(r.ratio);
    detail += "B=" + std::to_string(r.params.B) + " a=" + std::to_string(r.params.a) + " h=" +
              std::to_string(r.h) + " p=" + std::to_string(r.p) + " ratio " + fmt(r.ratio) + "; ";
  }
  bool monotone = true;
  for (std::size_t i = 1; i < ratios.size(); ++i)
    monotone = monotone && std::abs(ratios[i] - root2) < std::abs(ratios[i - 1] - root2);
  const double rel = std::abs(ratios.back() - root2) / root2;
  const double sec = seconds_since(t0);
  Verdict v;
  v.pass = monotone && rel <= kStaircaseRelative && sec < kStaircaseSeconds;
  v.detail = detail + "gap at 1e8 " + fmt(100 * rel, 3) + "%, " + (monotone ? "monotone" : "not monotone") +
             "; " + fmt(sec, 2) + " s";
  return v;
}

std::optional<ExternalSolver> reference_solver() {
  if (auto env = external_solver_from_env()) return env;
  if (std::system("python3 -c 'import highspy' >/dev/null 2>&1") == 0 ||
      std::system("python3 -c 'import scipy.optimize' >/dev/null 2>&1") == 0)
    return ExternalSolver{std::string("python3 ") + SWMSIM_SOURCE_DIR + "/tools/lp_adapter.py {input} {output}"};
  return std::nullopt;
}

// Solutions whose residuals criterion 7 re-checks.
std::vector<std::pair<CyclicLpModel, LpSolution>>& solved_models() {
  static std::vector<std::pair<CyclicLpModel, LpSolution>> v;
  return v;
}

std::vector<CyclicLpModel> small_models() {
  std::vector<CyclicLpModel> out;
  for (std::int64_t k : {2, 3, 5, 10, 20, 35, 50})
    for (Count B : {Count(2 * k), std::max<Count>(k + 1, std::llround(static_cast<double>(k * k) / 3.3))})
      for (auto var : {LpVariant::Any, LpVariant::Online, LpVariant::Lqd}) {
        auto m = build_model(k, B, var);
        // same D_cap an adaptive solve would settle on
        m.D_cap = solve(m).D_cap;
        out.push_back(m);
      }
  return out;
}

Verdict criterion5() {
  auto t0 = std::chrono::steady_clock::now();
  SolveOptions opt;
  opt.external = external_solver_from_env();
  auto r = ratio_report(300, 27272, opt);
  const double lp_sec = seconds_since(t0);
  for (auto [var, sol] : {std::pair{LpVariant::Any, &r.opt}, {LpVariant::Online, &r.online}, {LpVariant::Lqd, &r.lqd}}) {
    auto m = build_model(300, 27272, var);
    m.D_cap = sol->D_cap;
    solved_models().emplace_back(m, *sol);
  }
  const bool values = std::abs(r.opt.objective - 114546) <= kLpObjectiveAbs &&
                      std::abs(r.lqd.objective - 79392) <= kLpObjectiveAbs &&
                      std::abs(r.online.objective - 86292) <= kLpObjectiveAbs &&
                      std::abs(r.ratio_lqd() - 1.4427902) <= kLpRatioAbs &&
                      std::abs(r.ratio_online() - 1.32742316) <= kLpRatioAbs;

  std::string agreement;
  bool agree = true;
  auto ref = reference_solver();
  if (!ref) {
    agree = false;
    agreement = "no external solver available for the k <= 50 comparison";
  } else {
    double worst = 0;
    std::size_t n = 0;
    for (const auto& m : small_models()) {
      auto in = solve_internal(m);
      auto ex = solve_external(m, *ref);
      worst = std::max(worst, std::abs(in.objective - ex.objective));
      solved_models().emplace_back(m, in);
      solved_models().emplace_back(m, ex);
      ++n;
    }
    agree = worst <= kSolverAgreement;
    agreement = std::to_string(n) + " models with k <= 50, largest internal/external gap " + fmt(worst, 12);
  }
  Verdict v;
  v.pass = values && agree;
  v.detail = "ANY " + fmt(r.opt.objective, 3) + "/114546, ONLINE " + fmt(r.online.objective, 3) +
             "/86292, LQD " + fmt(r.lqd.objective, 3) + "/79392, ratio_lqd " + fmt(r.ratio_lqd(), 7) +
             "/1.4427902, ratio_online " + fmt(r.ratio_online(), 7) + "/1.32742316 (" + r.opt.provenance +
             ", " + fmt(lp_sec, 1) + " s); " + agreement;
  return v;
}

struct Profile {
  std::vector<double> g, ratio;
  double peak = 0, peak_g = 0;
  bool single_peaked = true;
};

Profile sweep_profile(RemainderOrder order) {
  Profile p;
  std::vector<std::future<PhiKComparison>> jobs;
  for (int i = 0; i <= 10; ++i) {
    const double g = 3.0 + 0.1 * i;
    p.g.push_back(g);
    const Count B = std::llround(300.0 * 300.0 / g);
    jobs.push_back(std::async(std::launch::async,
                              [=] { return compare_on_phi_k(300, B, kSweepCycles, kSweepWarmup, kSweepTail, order); }));
  }
  for (auto& j : jobs) p.ratio.push_back(j.get().ratio_steady());
  std::size_t top = 0;
  for (std::size_t i = 0; i < p.ratio.size(); ++i)
    if (p.ratio[i] > p.ratio[top]) top = i;
  p.peak = p.ratio[top];
  p.peak_g = p.g[top];
  for (std::size_t i = 0; i + 1 < p.ratio.size(); ++i) {
    if (i < top && p.ratio[i + 1] < p.ratio[i] - kProfileNoise) p.single_peaked = false;
    if (i >= top && p.ratio[i + 1] > p.ratio[i] + kProfileNoise) p.single_peaked = false;
  }
  return p;
}

Verdict criterion6() {
  auto t0 = std::chrono::steady_clock::now();
  Profile p = sweep_profile(RemainderOrder::LowestIdFirst);
  Verdict v;
  v.pass = p.peak >= kPeakLow && p.peak <= kPeakHigh && p.single_peaked;
  std::string prof;
  for (double r : p.ratio) prof += fmt(r, 5) + " ";
  v.detail = "k=300, " + std::to_string(kSweepCycles) + " cycles (warm-up " + std::to_string(kSweepWarmup) +
             ", tail " + std::to_string(kSweepTail) + "), peak " + fmt(p.peak, 5) + " at k^2/B=" + fmt(p.peak_g, 1) +
             ", " + (p.single_peaked ? "single-peaked" : "not single-peaked") + "; profile " + prof + "; " +
             fmt(seconds_since(t0), 1) + " s";
  Profile hi = sweep_profile(RemainderOrder::HighestIdFirst);
  v.detail += "\n    info: highest-id remainder gives peak " + fmt(hi.peak, 5) + " at " + fmt(hi.peak_g, 1) + ", " +
              (hi.single_peaked ? "single-peaked" : "not single-peaked");
  return v;
}

// Window constraints evaluated directly, with no truncation.
double residual(const CyclicLpModel& m, const std::vector<double>& a) {
  const auto k = static_cast<std::size_t>(m.k);
  double worst = 0;
  for (double x : a) worst = std::max(worst, -x);
  double amax = 0;
  for (double x : a) amax = std::max(amax, x);
  // terms with d > a_max + 1 vanish
  const auto depth = std::min<std::size_t>(static_cast<std::size_t>(m.B), static_cast<std::size_t>(amax) + 2);
  for (std::size_t t = 0; t < k; ++t) {
    double window = 0;
    for (std::size_t d = 0; d <= depth; ++d)
      window += std::max(a[(t + k * (d / k + 1) - d) % k] - static_cast<double>(d) + 1, 0.0);
    const double bt = static_cast<double>(m.k) - static_cast<double>(t) - 1;
    worst = std::max(worst, bt + window - static_cast<double>(m.B));
    if (m.variant != LpVariant::Any) worst = std::max(worst, bt * a[t] + window - static_cast<double>(m.B));
    if (m.variant == LpVariant::Lqd && t + 1 < k) worst = std::max(worst, a[t] - a[t + 1] - m.chain.step);
  }
  return worst;
}

Verdict criterion7() {
  std::ostringstream d;
  bool ok = true;

  // chain d_j <= d_{j+1} + 1 on phi_k
  Count worst_low = std::numeric_limits<Count>::min(), worst_high = worst_low;
  for (std::int64_t k : {4, 50, 300}) {
    for (double g : {1.0, 2.0, 3.3, 5.0}) {
      const Count B = std::max<Count>(k, std::llround(static_cast<double>(k * k) / g));
      auto tl = phi_k_instance({k, B, 4});
      for (auto order : {RemainderOrder::LowestIdFirst, RemainderOrder::HighestIdFirst}) {
        TimelineRunOptions opt;
        opt.record_slots = false;
        opt.order = order;
        auto r = run_timeline(tl, B, TimelinePolicy::Lqd, opt);
        auto dead = [&](QueueId j) {
          auto it = r.dead_transmissions.find(j);
          return it == r.dead_transmissions.end() ? Count(0) : it->second;
        };
        Count& w = order == RemainderOrder::LowestIdFirst ? worst_low : worst_high;
        for (QueueId j = 1; j < 4 * k; ++j) w = std::max(w, dead(j) - dead(j + 1) - 1);
      }
    }
  }
  const bool chain = worst_low <= 0;
  ok = ok && chain;
  d << "chain d_j - d_{j+1} - 1 max " << worst_low << " (highest-id remainder: " << worst_high << ")";

  // regularity on every shipped policy, fractional LQD <= LateQD
  int irregular = 0, frac_above = 0;
  const Corpus& c = corpus();
  for (const auto& [s, B] : c.raw) {
    for (const char* name : {"lqd", "lateqd", "brute-force"})
      if (!check_regularity(run(s, name, B, true), s, B).empty()) ++irregular;
    LqdPolicy high(RemainderOrder::HighestIdFirst);
    if (!check_regularity(run_snap(s, high, B), s, B).empty()) ++irregular;
    auto frac = testing::run_fractional(s, B, true);
    if (!check_regularity(frac, s, B).empty()) ++irregular;
    if (frac.total_transmitted > Rational(run(s, "lateqd", B).total_transmitted)) ++frac_above;
  }
  for (const auto& [tl, B] : c.timelines) {
    auto s = expand(tl, SwitchConfig{B, std::nullopt}, B);
    if (!check_regularity(run(s, "lateqd-aggregate", B, true), s, B).empty()) ++irregular;
  }
  for (auto [B, a] : std::vector<std::pair<Count, Count>>{{98, 10}, {100, 10}, {60, 4}}) {
    auto s = expand(staircase_instance(StaircaseParams::with_default_horizon(B, a)), SwitchConfig{B, std::nullopt}, B);
    StaircaseOfflinePolicy off;
    if (!check_regularity(run_snap(s, off, B), s, B).empty()) ++irregular;
    if (!check_regularity(run(s, "lateqd-aggregate", B, true), s, B).empty()) ++irregular;
  }
  ok = ok && irregular == 0 && frac_above == 0;
  d << "; regularity violations " << irregular << "; fractional LQD above LateQD on " << frac_above
    << " instances";

  // LP residuals, independent of max_violation
  if (solved_models().empty())
    for (const auto& m : small_models()) solved_models().emplace_back(m, solve_internal(m));
  double worst_res = 0;
  for (const auto& [m, sol] : solved_models()) worst_res = std::max(worst_res, residual(m, sol.a));
  ok = ok && worst_res <= kResidual;
  d << "; LP residual max " << fmt(worst_res, 9) << " over " << solved_models().size() << " solutions";

  return {ok, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"worked examples", criterion1}, {"optimality oracle", criterion2},  {"staircase occupancy", criterion3},
      {"staircase ratio", criterion4}, {"LP reproduction", criterion5},    {"sweep reproduction", criterion6},
      {"property suite", criterion7}};
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) {
    const int n = std::atoi(argv[i]);
    if (n < 1 || n > 7) {
      std::cerr << "usage: acceptance [criterion numbers 1-7]\n";
      return 1;
    }
    wanted.insert(n);
  }
  bool unexpected = false;
  for (int n = 1; n <= 7; ++n) {
    if (!wanted.empty() && !wanted.count(n)) continue;
    Verdict v;
    try {
      v = criteria[static_cast<std::size_t>(n - 1)].second();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const bool known = kKnownFailures.count(n) > 0;
    if (v.pass == known) unexpected = true;
    std::cout << "criterion " << n << ": " << (v.pass ? "PASS" : "FAIL") << (!v.pass && known ? " (known)" : "")
              << (v.pass && known ? " (unexpected pass)" : "") << " - " << criteria[static_cast<std::size_t>(n - 1)].first
              << ": " << v.detail << std::endl;
  }
  return unexpected ? 1 : 0;
}
