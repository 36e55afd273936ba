#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "swmsim/types.hpp"

namespace swmsim {

// maximize objective.x + objective_offset, rows sum(coef * x) <= rhs, x >= 0.
struct LinearProgram {
  struct Row {
    std::string name;
    std::vector<std::pair<std::size_t, double>> terms;  // sorted by column
    double rhs = 0;
    friend bool operator==(const Row&, const Row&) = default;
  };
  std::string name;
  std::vector<std::string> columns;
  std::vector<double> objective;
  double objective_offset = 0;
  std::vector<Row> rows;

  std::size_t column(const std::string& name) const;
  friend bool operator==(const LinearProgram&, const LinearProgram&) = default;
};

enum class LpVariant { Any, Online, Lqd };
std::string to_string(LpVariant v);
LpVariant parse_lp_variant(const std::string& s);

struct ChainOptions {
  // LQD rows a_t <= a_{t+1} + step for t = 1..k-1.
  double step = 0;
  // Optional wrap row a_k <= a_1 + wrap.
  std::optional<double> wrap;
};

struct CyclicLpModel {
  std::int64_t k = 2;
  Count B = 1;
  LpVariant variant = LpVariant::Any;
  std::int64_t D_cap = 1;
  ChainOptions chain;
  std::vector<double> b;  // b[t-1] = k - t
  std::vector<std::string> warnings;

  double b_sum() const;
  // Cyclic predecessor t (-) d, 1-based.
  std::int64_t back(std::int64_t t, std::int64_t d) const { return ((t - d - 1) % k + k) % k + 1; }
  // Explicit form with window variables s_<j>_<d>.
  LinearProgram program() const;
};

std::int64_t default_d_cap(Count B);

// D_cap = 0 picks the default. D_cap above B is clamped with a warning.
CyclicLpModel build_model(std::int64_t k, Count B, LpVariant variant, std::int64_t D_cap = 0,
                          ChainOptions chain = {});

struct LpSolution {
  double objective = 0;  // per cycle, including sum of b_t
  std::vector<double> a;
  std::string provenance;  // "internal" or "external"
  std::string solver;
  std::int64_t D_cap = 0;
  double max_residual = 0;
  std::size_t pivots = 0;
};

// Largest violation of the model's constraints at a, with every window
// variable at its smallest feasible value max(a_j - d + 1, 0).
double max_violation(const CyclicLpModel& model, const std::vector<double>& a);

struct ExternalSolver {
  // Command template with {input} and {output} placeholders.
  std::string command;
  std::string dialect = "pairs";  // "pairs" or "highs"
  std::string format = "mps";     // file handed to the solver: "mps" or "lp"
};

// Reads the command template from SWMSIM_LP_SOLVER, if set.
std::optional<ExternalSolver> external_solver_from_env();

struct SolveOptions {
  std::optional<ExternalSolver> external;
  double tolerance = 1e-7;
};

// Solves, doubling D_cap (up to B) until max a_t + 1 <= D_cap.
LpSolution solve(CyclicLpModel model, const SolveOptions& options = {});

// Bounded-variable revised simplex on an equivalent compact form: each a_t is
// split into unit segments, so only the window, online and chain rows remain.
LpSolution solve_internal(const CyclicLpModel& model, double tolerance = 1e-7);
LpSolution solve_external(const CyclicLpModel& model, const ExternalSolver& solver);

struct RatioReport {
  std::int64_t k = 0;
  Count B = 0;
  LpSolution opt, online, lqd;
  double ratio_lqd() const { return opt.objective / lqd.objective; }
  double ratio_online() const { return opt.objective / online.objective; }
};

RatioReport ratio_report(std::int64_t k, Count B, const SolveOptions& options = {}, ChainOptions chain = {},
                         std::int64_t D_cap = 0);

// Standard file formats. Both are deterministic.
void write_mps(const LinearProgram& lp, std::ostream& out);
void write_lp_text(const LinearProgram& lp, std::ostream& out);
LinearProgram read_mps(std::istream& in);
LinearProgram read_lp_text(std::istream& in);

// Solution files from external solvers: name -> value plus the objective.
struct ExternalSolution {
  std::optional<double> objective;
  std::vector<std::pair<std::string, double>> values;
};
ExternalSolution parse_solution(std::istream& in, const std::string& dialect);

}  // namespace swmsim
