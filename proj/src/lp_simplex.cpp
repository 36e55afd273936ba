#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "swmsim/types.hpp"
#include "swmsim/lp.hpp"

namespace swmsim {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Each a_j is split into unit segments y_{j,0..D-1} in [0, 1] plus a tail
// y_{j,D} >= 0. The window term max(a_j - d + 1, 0) for 1 <= d <= D is the sum
// of segments s >= d - 1, and the d = 0 term is a_j + 1. Because the window
// rows are convex in a, an optimum always fills segments in order, so this LP
// has the same optimum as the explicit form with window variables while
// keeping only the window, online and chain rows. Segment column (j, s)
// touches window rows j, j+1, ..., j+min(s+1, D) cyclically, which lets a
// reduced cost be priced with a running sum over the row duals.
class SegmentSimplex {
 public:
  explicit SegmentSimplex(const CyclicLpModel& m) : m_(m), k_(static_cast<std::size_t>(m.k)) {
    D_ = static_cast<std::size_t>(m.D_cap);
    width_ = D_ + 1;
    n_ = k_ * width_;
    online_ = m.variant != LpVariant::Any;
    lqd_ = m.variant == LpVariant::Lqd;
    rows_ = k_ * (online_ ? 2 : 1);
    chain0_ = rows_;
    if (lqd_) rows_ += k_ - 1 + (m.chain.wrap ? 1 : 0);

    rhs_.assign(rows_, 0.0);
    const double B = static_cast<double>(m.B);
    for (std::size_t t = 0; t < k_; ++t) {
      rhs_[t] = B - m.b[t] - 1;
      if (online_) rhs_[k_ + t] = B - 1;
    }
    if (lqd_) {
      for (std::size_t t = 0; t + 1 < k_; ++t) rhs_[chain0_ + t] = m.chain.step;
      if (m.chain.wrap) rhs_[rows_ - 1] = *m.chain.wrap;
    }
    for (std::size_t r = 0; r < rows_; ++r)
      if (rhs_[r] < 0) throw SolverError("LP has a negative right-hand side; the slack basis is not feasible");

    x_.assign(n_ + rows_, 0.0);
    at_upper_.assign(n_ + rows_, false);
    basic_.assign(n_ + rows_, -1);
    weight_.assign(n_ + rows_, 1.0);
    basis_.resize(rows_);
    binv_.assign(rows_ * rows_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r) {
      basis_[r] = n_ + r;
      basic_[n_ + r] = static_cast<long>(r);
      binv_[r * rows_ + r] = 1.0;
      x_[n_ + r] = rhs_[r];
    }
    crash();
  }

  void run() {
    std::vector<double> pi(rows_), w(rows_), a(rows_), rho(rows_), dot(n_ + rows_), alpha(n_ + rows_);
    std::vector<std::size_t> touched;
    std::size_t degenerate = 0;
    while (true) {
      if (pivots_ > 0 && pivots_ % 1000 == 0 && refreshed_ != pivots_) {
        refreshed_ = pivots_;
        if (pivots_ % 5000 == 0) reinvert();
        recompute_basic();
      }
      duals(pi);
      products(pi, dot);
      const long q = price(dot, degenerate > 50);
      if (q < 0) return;
      const auto qc = static_cast<std::size_t>(q);

      column(qc, a, touched);
      for (std::size_t i = 0; i < rows_; ++i) {
        double s = 0;
        const double* row = &binv_[i * rows_];
        for (std::size_t r : touched) s += row[r] * a[r];
        w[i] = s;
      }
      for (std::size_t r : touched) a[r] = 0;

      // sigma = +1 raises x_q from its lower bound, -1 lowers it from its upper.
      const double sigma = at_upper_[qc] ? -1.0 : 1.0;
      double theta = upper(qc);
      long leave = -1;
      for (std::size_t i = 0; i < rows_; ++i) {
        const double delta = -sigma * w[i];
        double limit;
        if (delta < -kPivot)
          limit = std::max(x_[basis_[i]], 0.0) / -delta;
        else if (delta > kPivot && upper(basis_[i]) < kInf)
          limit = std::max(upper(basis_[i]) - x_[basis_[i]], 0.0) / delta;
        else
          continue;
        if (limit < theta - 1e-12 ||
            (leave >= 0 && limit <= theta + 1e-12 && basis_[i] < basis_[static_cast<std::size_t>(leave)])) {
          theta = limit;
          leave = static_cast<long>(i);
        }
      }
      if (theta == kInf) throw SolverError("LP is unbounded");
      degenerate = theta < 1e-12 ? degenerate + 1 : 0;

      x_[qc] += sigma * theta;
      for (std::size_t i = 0; i < rows_; ++i) x_[basis_[i]] -= sigma * theta * w[i];
      if (leave < 0) {
        at_upper_[qc] = !at_upper_[qc];
        x_[qc] = at_upper_[qc] ? upper(qc) : 0.0;
        continue;
      }
      const auto r = static_cast<std::size_t>(leave);
      update_weights(qc, r, w[r], rho, alpha);
      const std::size_t out = basis_[r];
      const double delta = -sigma * w[r];
      at_upper_[out] = delta > 0;
      x_[out] = at_upper_[out] ? upper(out) : 0.0;
      basic_[out] = -1;
      basis_[r] = qc;
      basic_[qc] = static_cast<long>(r);
      at_upper_[qc] = false;
      pivot(r, w);
      ++pivots_;
    }
  }

  std::vector<double> acceptance() const {
    std::vector<double> a(k_, 0.0);
    for (std::size_t j = 0; j < k_; ++j)
      for (std::size_t s = 0; s < width_; ++s) a[j] += x_[j * width_ + s];
    return a;
  }

  std::size_t pivots() const { return pivots_; }

 private:
  static constexpr double kPivot = 1e-9;
  static constexpr double kCost = 1e-9;

  double upper(std::size_t v) const { return v < n_ && v % width_ < D_ ? 1.0 : kInf; }
  // Window rows touched by segment s: d = 0..min(s+1, D).
  std::size_t span(std::size_t s) const { return std::min(s + 1, D_) + 1; }

  template <class F>
  void for_each_entry(std::size_t v, F&& f) const {
    if (v >= n_) {
      f(v - n_, 1.0);
      return;
    }
    const std::size_t j = v / width_, L = span(v % width_);
    for (std::size_t d = 0; d < L; ++d) {
      const std::size_t t = (j + d) % k_;
      f(t, 1.0);
      if (online_) f(k_ + t, 1.0);
    }
    if (online_ && m_.b[j] != 0) f(k_ + j, m_.b[j]);
    if (lqd_) {
      if (j + 1 < k_) f(chain0_ + j, 1.0);
      if (j > 0) f(chain0_ + j - 1, -1.0);
      if (m_.chain.wrap) {
        if (j + 1 == k_) f(rows_ - 1, 1.0);
        if (j == 0) f(rows_ - 1, -1.0);
      }
    }
  }

  void column(std::size_t v, std::vector<double>& a, std::vector<std::size_t>& touched) const {
    touched.clear();
    for_each_entry(v, [&](std::size_t r, double c) {
      if (a[r] == 0) touched.push_back(r);
      a[r] += c;
      if (a[r] == 0) a[r] = 1e-300;  // keep it marked as touched
    });
  }

  void duals(std::vector<double>& pi) const {
    std::fill(pi.begin(), pi.end(), 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
      if (basis_[i] >= n_) continue;
      const double* row = &binv_[i * rows_];
      for (std::size_t r = 0; r < rows_; ++r) pi[r] += row[r];
    }
  }

  // out[v] = y . A_v for every column.
  void products(const std::vector<double>& y, std::vector<double>& out) const {
    for (std::size_t j = 0; j < k_; ++j) {
      double fixed = 0;
      if (online_) fixed += m_.b[j] * y[k_ + j];
      if (lqd_) {
        if (j + 1 < k_) fixed += y[chain0_ + j];
        if (j > 0) fixed -= y[chain0_ + j - 1];
        if (m_.chain.wrap) {
          if (j + 1 == k_) fixed += y[rows_ - 1];
          if (j == 0) fixed -= y[rows_ - 1];
        }
      }
      // running window sum over rows j .. j+L-1
      double acc = 0;
      std::size_t t = j;
      auto extend = [&] {
        acc += y[t];
        if (online_) acc += y[k_ + t];
        if (++t == k_) t = 0;
      };
      extend();
      for (std::size_t s = 0; s < width_; ++s) {
        if (s < D_) extend();
        out[j * width_ + s] = fixed + acc;
      }
    }
    for (std::size_t r = 0; r < rows_; ++r) out[n_ + r] = y[r];
  }

  // Devex: largest d_v^2 / weight_v over attractive nonbasic columns, or the
  // lowest attractive index under Bland's rule.
  long price(const std::vector<double>& dot, bool bland) const {
    long q = -1;
    double best = 0;
    for (std::size_t v = 0; v < n_ + rows_; ++v) {
      if (basic_[v] >= 0) continue;
      const double d = (v < n_ ? 1.0 : 0.0) - dot[v];
      const double gain = at_upper_[v] ? -d : d;
      if (gain <= kCost) continue;
      if (bland) return static_cast<long>(v);
      const double score = gain * gain / weight_[v];
      if (score > best) {
        best = score;
        q = static_cast<long>(v);
      }
    }
    return q;
  }

  void update_weights(std::size_t q, std::size_t r, double alpha_rq, std::vector<double>& rho,
                      std::vector<double>& alpha) {
    const double* row = &binv_[r * rows_];
    std::copy(row, row + rows_, rho.begin());
    products(rho, alpha);
    const double wq = weight_[q];
    double top = 0;
    for (std::size_t v = 0; v < n_ + rows_; ++v) {
      if (basic_[v] >= 0 || v == q) continue;
      const double ratio = alpha[v] / alpha_rq;
      weight_[v] = std::max(weight_[v], ratio * ratio * wq);
      top = std::max(top, weight_[v]);
    }
    weight_[basis_[r]] = std::max(wq / (alpha_rq * alpha_rq), 1.0);
    if (top > 1e8) std::fill(weight_.begin(), weight_.end(), 1.0);
  }

  void pivot(std::size_t r, const std::vector<double>& w) {
    double* prow = &binv_[r * rows_];
    const double inv = 1.0 / w[r];
    for (std::size_t c = 0; c < rows_; ++c) prow[c] *= inv;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i == r || w[i] == 0) continue;
      double* row = &binv_[i * rows_];
      const double f = w[i];
      for (std::size_t c = 0; c < rows_; ++c) row[c] -= f * prow[c];
    }
  }

  void recompute_basic() {
    std::vector<double> rhs = rhs_;
    for (std::size_t v = 0; v < n_; ++v)
      if (basic_[v] < 0 && at_upper_[v]) for_each_entry(v, [&](std::size_t r, double c) { rhs[r] -= c * upper(v); });
    for (std::size_t i = 0; i < rows_; ++i) {
      double s = 0;
      const double* row = &binv_[i * rows_];
      for (std::size_t r = 0; r < rows_; ++r) s += row[r] * rhs[r];
      x_[basis_[i]] = s;
    }
  }

  // Gauss-Jordan with partial pivoting on the current basis matrix.
  void reinvert() {
    const std::size_t m = rows_;
    std::vector<double> M(m * m, 0.0), I(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      for_each_entry(basis_[i], [&](std::size_t r, double c) { M[r * m + i] += c; });
      I[i * m + i] = 1.0;
    }
    for (std::size_t c = 0; c < m; ++c) {
      std::size_t p = c;
      for (std::size_t r = c + 1; r < m; ++r)
        if (std::abs(M[r * m + c]) > std::abs(M[p * m + c])) p = r;
      if (std::abs(M[p * m + c]) < 1e-12) throw SolverError("internal simplex basis became singular");
      if (p != c)
        for (std::size_t x = 0; x < m; ++x) {
          std::swap(M[p * m + x], M[c * m + x]);
          std::swap(I[p * m + x], I[c * m + x]);
        }
      const double inv = 1.0 / M[c * m + c];
      for (std::size_t x = 0; x < m; ++x) {
        M[c * m + x] *= inv;
        I[c * m + x] *= inv;
      }
      for (std::size_t r = 0; r < m; ++r) {
        const double f = M[r * m + c];
        if (r == c || f == 0) continue;
        for (std::size_t x = 0; x < m; ++x) {
          M[r * m + x] -= f * M[c * m + x];
          I[r * m + x] -= f * I[c * m + x];
        }
      }
    }
    binv_ = std::move(I);
  }

  // Greedy integer start: raise each a_j one unit at a time, round robin from
  // the last slot, while the slacks stay nonnegative. Raised segments sit at
  // their upper bound; the slack basis is unchanged.
  void crash() {
    std::vector<std::size_t> level(k_, 0);
    bool raised = true;
    while (raised) {
      raised = false;
      for (std::size_t jj = k_; jj-- > 0;) {
        if (level[jj] >= D_) continue;
        const std::size_t v = jj * width_ + level[jj];
        bool ok = true;
        for_each_entry(v, [&](std::size_t r, double c) {
          if (x_[n_ + r] - c < -1e-9) ok = false;
        });
        // repeated rows are checked one entry at a time, so re-check totals
        if (ok) {
          std::vector<std::pair<std::size_t, double>> e;
          for_each_entry(v, [&](std::size_t r, double c) { e.emplace_back(r, c); });
          std::sort(e.begin(), e.end());
          for (std::size_t i = 0; i < e.size() && ok;) {
            double c = 0;
            std::size_t r = e[i].first;
            for (; i < e.size() && e[i].first == r; ++i) c += e[i].second;
            if (x_[n_ + r] - c < -1e-9) ok = false;
          }
        }
        if (!ok) continue;
        for_each_entry(v, [&](std::size_t r, double c) { x_[n_ + r] -= c; });
        x_[v] = 1.0;
        at_upper_[v] = true;
        ++level[jj];
        raised = true;
      }
    }
  }

  const CyclicLpModel& m_;
  std::size_t k_, D_ = 0, width_ = 0, n_ = 0, rows_ = 0, chain0_ = 0;
  bool online_ = false, lqd_ = false;
  std::vector<double> rhs_, x_, binv_, weight_;
  std::vector<bool> at_upper_;
  std::vector<long> basic_;
  std::vector<std::size_t> basis_;
  std::size_t pivots_ = 0, refreshed_ = 0;
};

}  // namespace

LpSolution solve_internal(const CyclicLpModel& m, double /*tol*/) {
  const double B = static_cast<double>(m.B);
  for (std::size_t t = 0; t < static_cast<std::size_t>(m.k); ++t)
    if (m.b[t] + 1 > B)
      throw SolverError("LP infeasible: slot " + std::to_string(t + 1) + " needs b_t + 1 = " +
                        std::to_string(static_cast<long long>(m.b[t] + 1)) + " > B packets even with a = 0");

  SegmentSimplex lp(m);
  lp.run();
  LpSolution sol;
  sol.a = lp.acceptance();
  for (double& x : sol.a)
    if (std::abs(x) < 1e-11) x = 0;
  for (double x : sol.a) sol.objective += x;
  sol.objective += m.b_sum();
  sol.provenance = "internal";
  sol.solver = "swmsim bounded simplex";
  sol.D_cap = m.D_cap;
  sol.max_residual = max_violation(m, sol.a);
  sol.pivots = lp.pivots();
  return sol;
}

}  // namespace swmsim
