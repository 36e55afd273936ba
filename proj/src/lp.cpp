#include "swmsim/lp.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <map>

namespace swmsim {

std::size_t LinearProgram::column(const std::string& n) const {
  auto it = std::find(columns.begin(), columns.end(), n);
  if (it == columns.end()) throw InputError("no column named " + n);
  return static_cast<std::size_t>(it - columns.begin());
}

std::string to_string(LpVariant v) {
  switch (v) {
    case LpVariant::Any: return "any";
    case LpVariant::Online: return "online";
    case LpVariant::Lqd: return "lqd";
  }
  return "?";
}

LpVariant parse_lp_variant(const std::string& s) {
  std::string l = s;
  std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return std::tolower(c); });
  if (l == "any" || l == "opt") return LpVariant::Any;
  if (l == "online") return LpVariant::Online;
  if (l == "lqd") return LpVariant::Lqd;
  throw InputError("unknown LP variant '" + s + "' (any, online, lqd)");
}

double CyclicLpModel::b_sum() const {
  double s = 0;
  for (double x : b) s += x;
  return s;
}

std::int64_t default_d_cap(Count B) {
  return static_cast<std::int64_t>(std::ceil(std::sqrt(2.0 * static_cast<double>(B)))) + 2;
}

CyclicLpModel build_model(std::int64_t k, Count B, LpVariant variant, std::int64_t D_cap, ChainOptions chain) {
  if (k < 2) throw InputError("LP needs k >= 2");
  if (B < 1) throw InputError("buffer size B must be at least 1");
  if (D_cap < 0) throw InputError("D_cap must be at least 1");
  if (chain.step < 0 || (chain.wrap && *chain.wrap < 0)) throw InputError("chain slack must be non-negative");
  CyclicLpModel m;
  m.k = k;
  m.B = B;
  m.variant = variant;
  m.chain = chain;
  m.D_cap = D_cap == 0 ? default_d_cap(B) : D_cap;
  if (m.D_cap > B) {
    m.warnings.push_back("D_cap " + std::to_string(m.D_cap) + " clamped to B=" + std::to_string(B));
    m.D_cap = B;
  }
  for (std::int64_t t = 1; t <= k; ++t) m.b.push_back(static_cast<double>(k - t));
  return m;
}

LinearProgram CyclicLpModel::program() const {
  LinearProgram lp;
  lp.name = "PHI" + std::to_string(k) + "_" + to_string(variant);
  const std::size_t width = static_cast<std::size_t>(D_cap + 1);
  auto a_col = [](std::int64_t t) { return static_cast<std::size_t>(t - 1); };
  auto s_col = [&](std::int64_t j, std::int64_t d) {
    return static_cast<std::size_t>(k) + static_cast<std::size_t>(j - 1) * width + static_cast<std::size_t>(d);
  };
  for (std::int64_t t = 1; t <= k; ++t) {
    lp.columns.push_back("a_" + std::to_string(t));
    lp.objective.push_back(1.0);
  }
  for (std::int64_t j = 1; j <= k; ++j)
    for (std::int64_t d = 0; d <= D_cap; ++d) {
      lp.columns.push_back("s_" + std::to_string(j) + "_" + std::to_string(d));
      lp.objective.push_back(0.0);
    }
  lp.objective_offset = b_sum();

  auto window = [&](std::int64_t t) {
    LinearProgram::Row r;
    for (std::int64_t d = 0; d <= D_cap; ++d) r.terms.emplace_back(s_col(back(t, d), d), 1.0);
    return r;
  };
  auto finish = [](LinearProgram::Row& r) {
    std::sort(r.terms.begin(), r.terms.end());
    // Merge repeated columns.
    std::vector<std::pair<std::size_t, double>> merged;
    for (const auto& term : r.terms) {
      if (!merged.empty() && merged.back().first == term.first)
        merged.back().second += term.second;
      else
        merged.push_back(term);
    }
    r.terms = std::move(merged);
  };
  for (std::int64_t t = 1; t <= k; ++t) {
    const double bt = b[static_cast<std::size_t>(t - 1)];
    auto r = window(t);
    r.name = "win_" + std::to_string(t);
    r.rhs = static_cast<double>(B) - bt;
    finish(r);
    lp.rows.push_back(std::move(r));
    if (variant != LpVariant::Any) {
      auto o = window(t);
      o.name = "onl_" + std::to_string(t);
      if (bt != 0) o.terms.emplace_back(a_col(t), bt);
      o.rhs = static_cast<double>(B);
      finish(o);
      lp.rows.push_back(std::move(o));
    }
  }
  for (std::int64_t j = 1; j <= k; ++j)
    for (std::int64_t d = 0; d <= D_cap; ++d) {
      LinearProgram::Row r;
      r.name = "lnk_" + std::to_string(j) + "_" + std::to_string(d);
      r.terms = {{a_col(j), 1.0}, {s_col(j, d), -1.0}};
      r.rhs = static_cast<double>(d - 1);
      lp.rows.push_back(std::move(r));
    }
  if (variant == LpVariant::Lqd) {
    for (std::int64_t t = 1; t < k; ++t)
      lp.rows.push_back({"chn_" + std::to_string(t), {{a_col(t), 1.0}, {a_col(t + 1), -1.0}}, chain.step});
    if (chain.wrap) lp.rows.push_back({"wrap", {{a_col(1), -1.0}, {a_col(k), 1.0}}, *chain.wrap});
  }
  return lp;
}

double max_violation(const CyclicLpModel& m, const std::vector<double>& a) {
  if (a.size() != static_cast<std::size_t>(m.k)) throw ContractError("solution has the wrong length");
  double worst = 0;
  for (double x : a) worst = std::max(worst, -x);
  const double B = static_cast<double>(m.B);
  for (std::int64_t t = 1; t <= m.k; ++t) {
    double w = 0;
    for (std::int64_t d = 0; d <= m.D_cap; ++d)
      w += std::max(a[static_cast<std::size_t>(m.back(t, d) - 1)] - static_cast<double>(d) + 1, 0.0);
    const double bt = m.b[static_cast<std::size_t>(t - 1)];
    worst = std::max(worst, bt + w - B);
    if (m.variant != LpVariant::Any) worst = std::max(worst, bt * a[static_cast<std::size_t>(t - 1)] + w - B);
  }
  if (m.variant == LpVariant::Lqd) {
    for (std::int64_t t = 1; t < m.k; ++t)
      worst = std::max(worst, a[static_cast<std::size_t>(t - 1)] - a[static_cast<std::size_t>(t)] - m.chain.step);
    if (m.chain.wrap) worst = std::max(worst, a.back() - a.front() - *m.chain.wrap);
  }
  return worst;
}

LpSolution solve(CyclicLpModel model, const SolveOptions& options) {
  while (true) {
    LpSolution sol = options.external ? solve_external(model, *options.external) : solve_internal(model, options.tolerance);
    double amax = 0;
    for (double x : sol.a) amax = std::max(amax, x);
    if (amax + 1 <= static_cast<double>(model.D_cap) + options.tolerance || model.D_cap >= model.B) return sol;
    model.D_cap = std::min<std::int64_t>(2 * model.D_cap, model.B);
  }
}

RatioReport ratio_report(std::int64_t k, Count B, const SolveOptions& options, ChainOptions chain,
                         std::int64_t D_cap) {
  auto run = [&](LpVariant v) { return solve(build_model(k, B, v, D_cap, chain), options); };
  auto opt = std::async(std::launch::async, run, LpVariant::Any);
  auto online = std::async(std::launch::async, run, LpVariant::Online);
  auto lqd = std::async(std::launch::async, run, LpVariant::Lqd);
  RatioReport r;
  r.k = k;
  r.B = B;
  r.opt = opt.get();
  r.online = online.get();
  r.lqd = lqd.get();
  return r;
}

}  // namespace swmsim
