// swmsim command line: gen, simulate, sweep, bound, dead-trace.

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include "swmsim/experiments.hpp"
#include "swmsim/instance_io.hpp"
#include "swmsim/lp.hpp"
#include "swmsim/policies.hpp"

using json = nlohmann::ordered_json;
using namespace swmsim;

namespace {

constexpr const char* kCsvVersion = "# swmsim-csv v1";

struct Globals {
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "";
  unsigned threads = 0;
};

// Writes to --out when given, stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw InputError("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

RemainderOrder parse_order(const std::string& s) {
  if (s == "lowest") return RemainderOrder::LowestIdFirst;
  if (s == "highest") return RemainderOrder::HighestIdFirst;
  throw InputError("--lqd-remainder must be lowest or highest");
}

std::string csv_num(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

template <typename Q>
json quantity_json(const Q& q) {
  if constexpr (std::is_same_v<Q, Count>) {
    return q;
  } else {
    Rational r = q;
    r.canonicalize();
    if (r.get_den() == 1) return r.get_num().get_si();
    return r.get_str();
  }
}

template <typename Q>
void write_trace(const BasicSimulationResult<Q>& r, std::ostream& out) {
  using T = QuantityTraits<Q>;
  out << kCsvVersion << '\n' << "slot,transmitted,a_t,b_t,total_occupancy\n";
  for (const auto& s : r.slots) {
    out << s.slot << ',' << T::to_string(s.transmitted) << ','
        << (s.dying_acceptance ? T::to_string(*s.dying_acceptance) : "") << ',' << s.live_count << ','
        << T::to_string(s.total_occupancy) << '\n';
  }
}

template <typename Q>
json summary(const BasicSimulationResult<Q>& r, const std::string& policy) {
  json dead = json::object();
  for (const auto& [q, n] : r.dead_transmissions) dead[std::to_string(q)] = quantity_json(n);
  return json{{"policy", policy},
              {"total", quantity_json(r.total_transmitted)},
              {"arrivals", quantity_json(r.total_arrivals)},
              {"dropped", quantity_json(r.total_dropped)},
              {"per_queue_dead", dead}};
}

// ---- gen ----

struct GenArgs {
  std::string family;
  Count B = 0;
  std::optional<Count> a;
  std::optional<double> C;
  bool exact = false;
  std::int64_t k = 0, cycles = 1;
  std::optional<Slot> horizon;
  std::int64_t N = 3;
  Slot T = 6;
  Count max_burst = 3;
};

int cmd_gen(const GenArgs& g, const Globals& glob) {
  InstanceFile f;
  f.B = g.B;
  if (g.family == "staircase") {
    if (g.a.has_value() == g.C.has_value()) throw InputError("staircase needs exactly one of --a and --C");
    StaircaseParams p = g.a ? StaircaseParams::with_default_horizon(g.B, *g.a, g.exact)
                            : StaircaseParams::from_c(g.B, *g.C, g.exact);
    if (g.horizon) p.horizon = *g.horizon;
    p.validate();
    f.body = staircase_instance(p);
  } else if (g.family == "phi-k") {
    if (g.k < 2) throw InputError("phi-k needs --k >= 2");
    f.body = phi_k_instance({g.k, g.B, g.cycles});
  } else if (g.family == "random") {
    // small schedules for oracle checks: up to max_burst packets per queue and slot
    if (g.N < 1 || g.T < 0 || g.max_burst < 0) throw InputError("random needs --N >= 1, --T >= 0");
    std::mt19937_64 rng(glob.seed);
    std::uniform_int_distribution<Count> burst(0, std::min(g.max_burst, g.B));
    ArrivalSchedule s(g.B);
    for (Slot t = 0; t <= g.T; ++t)
      for (QueueId q = 1; q <= g.N; ++q)
        if (Count n = burst(rng); n > 0) s.add(t, q, n);
    f.N = g.N;
    f.body = std::move(s);
  } else {
    throw InputError("--family must be staircase, phi-k or random");
  }
  Output out(glob.out);
  write_instance(f, out.stream());
  return 0;
}

// ---- simulate ----

struct SimulateArgs {
  std::string instance;
  std::string policy = "lqd";
  std::string remainder = "lowest";
  std::string trace;
};

int cmd_simulate(const SimulateArgs& a, const Globals& glob) {
  std::ifstream in(a.instance);
  if (!in) throw InputError("cannot read " + a.instance);
  InstanceFile inst = read_instance(in);
  ArrivalSchedule schedule = inst.schedule();
  const std::string format = glob.format.empty() ? "json" : glob.format;
  if (format != "json" && format != "csv") throw InputError("--format must be csv or json");

  auto emit = [&](const auto& result) {
    if (!a.trace.empty()) {
      std::ofstream t(a.trace);
      if (!t) throw InputError("cannot write " + a.trace);
      write_trace(result, t);
    }
    Output out(glob.out);
    if (format == "csv")
      write_trace(result, out.stream());
    else
      out.stream() << summary(result, a.policy).dump(2) << '\n';
  };

  if (a.policy == "lqd-frac") {
    FractionalLqdPolicy p;
    emit(simulate(schedule, p, inst.config()));
    return 0;
  }
  std::unique_ptr<PushOutPolicy> p;
  if (a.policy == "lqd")
    p = std::make_unique<LqdPolicy>(parse_order(a.remainder));
  else
    p = make_policy(a.policy);
  emit(simulate(schedule, *p, inst.config()));
  return 0;
}

// ---- sweep ----

struct SweepArgs {
  std::vector<std::int64_t> ks{300};
  std::string grid = "2.0:6.0:0.1";
  std::int64_t cycles = 10, warmup = 2, tail = 1;
  std::string remainder = "lowest";
  bool lp = false;
  bool stretch = false;
};

std::vector<double> parse_grid(const std::string& s) {
  std::vector<double> g;
  auto num = [&](const std::string& x) {
    try {
      std::size_t used = 0;
      double v = std::stod(x, &used);
      if (used != x.size()) throw std::invalid_argument(x);
      return v;
    } catch (const std::exception&) {
      throw InputError("bad grid value '" + x + "'");
    }
  };
  if (s.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw InputError("--grid expects lo:hi:step or a comma list");
    const double lo = num(parts[0]), hi = num(parts[1]), step = num(parts[2]);
    if (step <= 0 || hi < lo) throw InputError("--grid needs lo <= hi and step > 0");
    const auto n = static_cast<std::int64_t>(std::floor((hi - lo) / step + 1e-9));
    for (std::int64_t i = 0; i <= n; ++i) g.push_back(std::round((lo + static_cast<double>(i) * step) * 1e9) / 1e9);
  } else {
    std::stringstream ss(s);
    for (std::string p; std::getline(ss, p, ',');) g.push_back(num(p));
  }
  for (double x : g)
    if (x <= 0) throw InputError("grid values must be positive");
  return g;
}

struct SweepRow {
  std::int64_t k = 0;
  Count B = 0;
  double g = 0;
  std::string method;
  double total_opt = 0, total_policy = 0, ratio = 0;
  double steady_opt = 0, steady_policy = 0, ratio_steady = 0;
  std::string error;
};

int cmd_sweep(SweepArgs a, const Globals& glob) {
  if (a.stretch) {
    // the large-k run: B = 2.5e10 at k = 300000, hours of runtime
    a.ks = {300000};
    a.grid = "3.6";
  }
  const RemainderOrder order = parse_order(a.remainder);
  const std::vector<double> grid = parse_grid(a.grid);
  struct Job {
    std::int64_t k;
    double g;
    bool lp;
  };
  std::vector<Job> jobs;
  for (auto k : a.ks) {
    if (k < 2) throw InputError("k must be at least 2");
    for (double g : grid) {
      jobs.push_back({k, g, false});
      if (a.lp) jobs.push_back({k, g, true});
    }
  }
  std::vector<SweepRow> rows(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < jobs.size();) {
      const Job& j = jobs[i];
      SweepRow& r = rows[i];
      r.k = j.k;
      r.g = j.g;
      r.B = std::llround(static_cast<double>(j.k) * static_cast<double>(j.k) / j.g);
      r.method = j.lp ? "lp" : "simulation";
      try {
        if (r.B < j.k) throw InputError("B = round(k^2/g) is below k");
        if (j.lp) {
          auto rep = ratio_report(j.k, r.B, SolveOptions{external_solver_from_env()});
          r.total_opt = rep.opt.objective;
          r.total_policy = rep.lqd.objective;
          r.ratio = rep.ratio_lqd();
        } else {
          auto c = compare_on_phi_k(j.k, r.B, a.cycles, a.warmup, a.tail, order);
          r.total_opt = static_cast<double>(c.lateqd_total);
          r.total_policy = static_cast<double>(c.lqd_total);
          r.ratio = c.ratio_total();
          r.steady_opt = c.lateqd_steady * static_cast<double>(j.k);
          r.steady_policy = c.lqd_steady * static_cast<double>(j.k);
          r.ratio_steady = c.ratio_steady();
        }
      } catch (const Error& e) {
        r.error = e.what();
      }
    }
  };
  unsigned n = glob.threads ? glob.threads : std::max(1u, std::thread::hardware_concurrency());
  n = std::min<unsigned>(n, static_cast<unsigned>(jobs.size()));
  std::vector<std::thread> pool;
  for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  Output out(glob.out);
  std::ostream& os = out.stream();
  if (glob.format == "json") {
    json arr = json::array();
    for (const auto& r : rows) {
      json o{{"k", r.k}, {"B", r.B}, {"k2_over_B", r.g}, {"method", r.method}};
      if (r.error.empty()) {
        o["total_opt"] = r.total_opt;
        o["total_policy"] = r.total_policy;
        o["ratio"] = r.ratio;
        if (r.method == "simulation") {
          o["steady_opt_per_cycle"] = r.steady_opt;
          o["steady_policy_per_cycle"] = r.steady_policy;
          o["ratio_steady"] = r.ratio_steady;
        }
      } else {
        o["error"] = r.error;
      }
      arr.push_back(o);
    }
    json doc{{"cycles", a.cycles}, {"warmup_cycles", a.warmup}, {"tail_cycles", a.tail}, {"rows", arr}};
    os << doc.dump(2) << '\n';
  } else if (glob.format.empty() || glob.format == "csv") {
    os << kCsvVersion << '\n'
       << "k,B,k2_over_B,total_opt,total_policy,ratio,method,steady_opt_per_cycle,steady_policy_per_cycle,"
          "ratio_steady,error\n";
    for (const auto& r : rows) {
      os << r.k << ',' << r.B << ',' << csv_num(r.g) << ',';
      if (r.error.empty()) {
        os << csv_num(r.total_opt) << ',' << csv_num(r.total_policy) << ',' << csv_num(r.ratio) << ',' << r.method
           << ',';
        if (r.method == "simulation")
          os << csv_num(r.steady_opt) << ',' << csv_num(r.steady_policy) << ',' << csv_num(r.ratio_steady);
        else
          os << ",,";
        os << ",\n";
      } else {
        std::string e = r.error;
        for (char& c : e)
          if (c == ',' || c == '\n') c = ';';
        os << ",,," << r.method << ",,,," << e << '\n';
      }
    }
  } else {
    throw InputError("--format must be csv or json");
  }
  return 0;
}

// ---- bound ----

struct BoundArgs {
  std::int64_t k = 300;
  Count B = 27272;
  std::int64_t D_cap = 0;
  std::optional<double> chain_slack;
  double chain_step = 0;
  std::string emit_mps, emit_lp;
  std::string solver, dialect, solver_format;
};

int cmd_bound(const BoundArgs& a, const Globals& glob) {
  if (a.k < 2) throw InputError("--k must be at least 2");
  if (a.B < 1) throw InputError("--B must be positive");
  ChainOptions chain{a.chain_step, a.chain_slack};
  const std::vector<LpVariant> variants{LpVariant::Any, LpVariant::Online, LpVariant::Lqd};

  if (!a.emit_mps.empty() || !a.emit_lp.empty()) {
    // files only; <path> becomes <path>.<variant>.<ext>
    for (auto v : variants) {
      auto m = build_model(a.k, a.B, v, a.D_cap, chain);
      for (const auto& w : m.warnings) std::cerr << "warning: " << w << '\n';
      auto lp = m.program();
      auto write = [&](const std::string& base, const std::string& ext, auto fn) {
        if (base.empty()) return;
        const std::string path = base + "." + to_string(v) + "." + ext;
        std::ofstream f(path);
        if (!f) throw InputError("cannot write " + path);
        fn(lp, f);
      };
      write(a.emit_mps, "mps", [](const LinearProgram& p, std::ostream& o) { write_mps(p, o); });
      write(a.emit_lp, "lp", [](const LinearProgram& p, std::ostream& o) { write_lp_text(p, o); });
    }
    return 0;
  }

  SolveOptions opt;
  opt.external = external_solver_from_env();
  if (!a.solver.empty()) opt.external = ExternalSolver{a.solver};
  if (opt.external) {
    if (!a.dialect.empty()) opt.external->dialect = a.dialect;
    if (!a.solver_format.empty()) opt.external->format = a.solver_format;
  }
  RatioReport r = ratio_report(a.k, a.B, opt, chain, a.D_cap);
  auto sol = [](const LpSolution& s) {
    return json{{"objective", s.objective}, {"provenance", s.provenance}, {"solver", s.solver},
                {"D_cap", s.D_cap},        {"max_residual", s.max_residual}, {"a", s.a}};
  };
  json doc{{"k", r.k},
           {"B", r.B},
           {"opt", r.opt.objective},
           {"online", r.online.objective},
           {"lqd", r.lqd.objective},
           {"ratio_lqd", r.ratio_lqd()},
           {"ratio_online", r.ratio_online()},
           {"solver", r.opt.provenance == "internal" ? r.opt.solver : "external: " + r.opt.solver},
           {"chain", {{"step", a.chain_step}, {"wrap", a.chain_slack ? json(*a.chain_slack) : json(nullptr)}}},
           {"details", {{"any", sol(r.opt)}, {"online", sol(r.online)}, {"lqd", sol(r.lqd)}}}};
  if (!glob.format.empty() && glob.format != "json") throw InputError("bound writes JSON only");
  Output out(glob.out);
  out.stream() << doc.dump(2) << '\n';
  return 0;
}

// ---- dead-trace ----

int cmd_dead_trace(std::int64_t k, Count B, std::int64_t cycles, const Globals& glob) {
  if (k < 2 || B < 1 || cycles < 1) throw InputError("dead-trace needs k >= 2, B >= 1, cycles >= 1");
  auto rows = phi_k_dead_trace(k, B, cycles);
  Output out(glob.out);
  std::ostream& os = out.stream();
  if (glob.format == "json") {
    json arr = json::array();
    for (const auto& r : rows)
      arr.push_back({{"queue", r.queue},
                     {"dying_slot", r.dying_slot},
                     {"lqd_accepted", r.lqd_accepted},
                     {"lqd_sent_after", r.lqd_sent_after},
                     {"lateqd_accepted", r.lateqd_accepted}});
    os << arr.dump(2) << '\n';
    return 0;
  }
  os << kCsvVersion << '\n' << "queue,dying_slot,lqd_accepted,lqd_sent_after,lateqd_accepted\n";
  for (const auto& r : rows)
    os << r.queue << ',' << r.dying_slot << ',' << r.lqd_accepted << ',' << r.lqd_sent_after << ','
       << r.lateqd_accepted << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shared-memory switch buffer management simulator"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals glob;
  app.add_option("--seed", glob.seed, "Seed for randomized generators");
  app.add_option("--out", glob.out, "Output file (default stdout)");
  app.add_option("--format", glob.format, "csv or json");
  app.add_option("--threads", glob.threads, "Worker threads for sweeps (default: all cores)");

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Emit an instance file");
  g->add_option("--family", gen.family, "staircase, phi-k or random")->required();
  g->add_option("--B", gen.B, "Buffer size")->required();
  g->add_option("--a", gen.a, "Staircase receivers per slot minus one");
  g->add_option("--C", gen.C, "Staircase a / sqrt(B)");
  g->add_flag("--exact", gen.exact, "Require B = a*h + h(h+1)/2");
  g->add_option("--k", gen.k, "Cycle length for phi-k");
  g->add_option("--cycles", gen.cycles, "Cycles for phi-k");
  g->add_option("--horizon", gen.horizon, "Last arrival slot for staircase");
  g->add_option("--N", gen.N, "Queues for random");
  g->add_option("--T", gen.T, "Last slot for random");
  g->add_option("--max-burst", gen.max_burst, "Largest arrival per queue and slot for random");

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Run a policy on an instance file");
  s->add_option("instance", sim.instance, "Instance file")->required();
  s->add_option("--policy", sim.policy, "lqd, lqd-frac, lateqd, lateqd-aggregate, staircase-offline, brute-force");
  s->add_option("--lqd-remainder", sim.remainder, "lowest or highest: which over-level queues keep the remainder");
  s->add_option("--trace", sim.trace, "Also write the trace CSV here");

  SweepArgs sw;
  auto* w = app.add_subcommand("sweep", "LateQD/LQD ratio on Phi_k over a k^2/B grid");
  w->add_option("--k", sw.ks, "Cycle lengths")->delimiter(',');
  w->add_option("--grid", sw.grid, "k^2/B values: lo:hi:step or a comma list");
  w->add_option("--cycles", sw.cycles, "Cycles per instance");
  w->add_option("--warmup-cycles", sw.warmup, "Cycles excluded before measuring");
  w->add_option("--tail-cycles", sw.tail, "Final cycles excluded from the steady ratio");
  w->add_option("--lqd-remainder", sw.remainder, "lowest or highest");
  w->add_flag("--lp", sw.lp, "Add LP rows (ANY over LQD) for each point");
  w->add_flag("--stretch", sw.stretch, "Run the single k=300000, B=2.5e10 point");

  BoundArgs bd;
  auto* b = app.add_subcommand("bound", "Solve the cyclic LPs and report ratio bounds");
  b->add_option("--k", bd.k, "Cycle length");
  b->add_option("--B", bd.B, "Buffer size");
  b->add_option("--D-cap", bd.D_cap, "Window truncation depth (default ceil(sqrt(2B)) + 2)");
  b->add_option("--chain-slack", bd.chain_slack, "Add the wrap row a_k <= a_1 + c to the LQD chain");
  b->add_option("--chain-step", bd.chain_step, "Slack in a_t <= a_{t+1} + step");
  b->add_option("--emit-mps", bd.emit_mps, "Write <path>.<variant>.mps and exit");
  b->add_option("--emit-lp", bd.emit_lp, "Write <path>.<variant>.lp and exit");
  b->add_option("--solver", bd.solver, "External solver command with {input} and {output}");
  b->add_option("--solver-dialect", bd.dialect, "pairs or highs");
  b->add_option("--solver-format", bd.solver_format, "mps or lp");

  std::int64_t dk = 30, dcycles = 3;
  Count dB = 250;
  auto* d = app.add_subcommand("dead-trace", "Per dying queue acceptance and transmissions on Phi_k");
  d->add_option("--k", dk, "Cycle length");
  d->add_option("--B", dB, "Buffer size");
  d->add_option("--cycles", dcycles, "Cycles");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*g) return cmd_gen(gen, glob);
    if (*s) return cmd_simulate(sim, glob);
    if (*w) return cmd_sweep(sw, glob);
    if (*b) return cmd_bound(bd, glob);
    if (*d) return cmd_dead_trace(dk, dB, dcycles, glob);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const ContractError& e) {
    std::cerr << "contract error: " << e.what() << '\n';
    return 3;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return 3;
  }
  return 1;
}
