#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <unistd.h>

#include "swmsim/lp.hpp"

namespace swmsim {

namespace {

std::string num(double v) {
  if (v == 0) return "0";
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

double parse_num(const std::string& s, const std::string& where) {
  double v = 0;
  const char* first = s.data();
  if (!s.empty() && s[0] == '+') ++first;
  auto [end, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size())
    throw InputError("bad number '" + s + "' in " + where);
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::string pad(const std::string& s, std::size_t w) { return s.size() >= w ? s : s + std::string(w - s.size(), ' '); }

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

void write_mps(const LinearProgram& lp, std::ostream& out) {
  // Column-major view of the rows.
  std::vector<std::vector<std::pair<std::size_t, double>>> cols(lp.columns.size());
  for (std::size_t r = 0; r < lp.rows.size(); ++r)
    for (const auto& [c, v] : lp.rows[r].terms) cols[c].emplace_back(r, v);

  out << "* objective offset " << num(lp.objective_offset) << " is the negated RHS of row obj\n";
  out << "NAME          " << lp.name << "\n";
  out << "OBJSENSE\n    MAX\n";
  out << "ROWS\n N  obj\n";
  for (const auto& r : lp.rows) out << " L  " << r.name << "\n";
  out << "COLUMNS\n";
  for (std::size_t c = 0; c < lp.columns.size(); ++c) {
    const std::string name = pad(lp.columns[c], 8);
    if (lp.objective[c] != 0 || cols[c].empty())
      out << "    " << name << "  " << pad("obj", 8) << "  " << num(lp.objective[c]) << "\n";
    for (const auto& [r, v] : cols[c]) out << "    " << name << "  " << pad(lp.rows[r].name, 8) << "  " << num(v) << "\n";
  }
  out << "RHS\n";
  if (lp.objective_offset != 0) out << "    RHS       " << pad("obj", 8) << "  " << num(-lp.objective_offset) << "\n";
  for (const auto& r : lp.rows)
    if (r.rhs != 0) out << "    RHS       " << pad(r.name, 8) << "  " << num(r.rhs) << "\n";
  out << "ENDATA\n";
}

LinearProgram read_mps(std::istream& in) {
  LinearProgram lp;
  std::map<std::string, std::size_t> rows, cols;
  std::string objective_row;
  bool minimize = false;
  std::string section, line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = "MPS line " + std::to_string(line_no);
    if (line.empty() || line[0] == '*') continue;
    auto f = split(line);
    if (f.empty()) continue;
    if (!std::isspace(static_cast<unsigned char>(line[0]))) {
      section = f[0];
      if (section == "NAME") lp.name = f.size() > 1 ? f[1] : "";
      if (section == "OBJSENSE" && f.size() > 1) minimize = f[1] == "MIN" || f[1] == "MINIMIZE";
      if (section == "ENDATA") break;
      if (section == "BOUNDS" || section == "RANGES") throw InputError(section + " section not supported (" + where + ")");
      continue;
    }
    if (section == "OBJSENSE") {
      minimize = f[0] == "MIN" || f[0] == "MINIMIZE";
    } else if (section == "ROWS") {
      if (f.size() != 2) throw InputError("bad row line at " + where);
      if (f[0] == "N") {
        if (objective_row.empty()) objective_row = f[1];
      } else if (f[0] == "L") {
        rows[f[1]] = lp.rows.size();
        lp.rows.push_back({f[1], {}, 0.0});
      } else {
        throw InputError("only <= rows are supported, got type " + f[0] + " at " + where);
      }
    } else if (section == "COLUMNS") {
      if (f.size() > 1 && f[1] == "'MARKER'") continue;
      if (f.size() != 3 && f.size() != 5) throw InputError("bad column line at " + where);
      auto [it, fresh] = cols.try_emplace(f[0], lp.columns.size());
      if (fresh) {
        lp.columns.push_back(f[0]);
        lp.objective.push_back(0.0);
      }
      for (std::size_t i = 1; i + 1 < f.size(); i += 2) {
        double v = parse_num(f[i + 1], where);
        if (f[i] == objective_row) {
          lp.objective[it->second] = v;
        } else {
          auto r = rows.find(f[i]);
          if (r == rows.end()) throw InputError("unknown row " + f[i] + " at " + where);
          lp.rows[r->second].terms.emplace_back(it->second, v);
        }
      }
    } else if (section == "RHS") {
      if (f.size() != 3 && f.size() != 5) throw InputError("bad RHS line at " + where);
      for (std::size_t i = 1; i + 1 < f.size(); i += 2) {
        double v = parse_num(f[i + 1], where);
        if (f[i] == objective_row) {
          lp.objective_offset = -v;
        } else {
          auto r = rows.find(f[i]);
          if (r == rows.end()) throw InputError("unknown row " + f[i] + " at " + where);
          lp.rows[r->second].rhs = v;
        }
      }
    } else {
      throw InputError("data outside a known section at " + where);
    }
  }
  if (minimize) {
    for (auto& c : lp.objective) c = -c;
    lp.objective_offset = -lp.objective_offset;
  }
  for (auto& r : lp.rows) std::sort(r.terms.begin(), r.terms.end());
  return lp;
}

namespace {

// Writes "name: t1 + t2 ..." wrapped over several lines.
void write_terms(std::ostream& out, const std::vector<std::pair<std::string, double>>& terms) {
  std::size_t on_line = 0;
  bool first = true;
  for (const auto& [name, v] : terms) {
    if (on_line == 8) {
      out << "\n   ";
      on_line = 0;
    }
    if (first) {
      out << (v < 0 ? " - " : " ");
    } else {
      out << (v < 0 ? " - " : " + ");
    }
    double m = std::abs(v);
    if (m != 1 || v == 0) out << num(m) << " ";
    out << name;
    first = false;
    ++on_line;
  }
}

}  // namespace

void write_lp_text(const LinearProgram& lp, std::ostream& out) {
  out << "\\ " << lp.name << "\n";
  out << "\\ objective offset " << num(lp.objective_offset) << "\n";
  out << "Maximize\n obj:";
  std::vector<std::pair<std::string, double>> obj;
  for (std::size_t c = 0; c < lp.columns.size(); ++c) obj.emplace_back(lp.columns[c], lp.objective[c]);
  write_terms(out, obj);
  out << "\nSubject To\n";
  for (const auto& r : lp.rows) {
    out << " " << r.name << ":";
    std::vector<std::pair<std::string, double>> terms;
    for (const auto& [c, v] : r.terms) terms.emplace_back(lp.columns[c], v);
    write_terms(out, terms);
    out << " <= " << num(r.rhs) << "\n";
  }
  out << "End\n";
}

LinearProgram read_lp_text(std::istream& in) {
  LinearProgram lp;
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("\\", 0) == 0) {
      auto f = split(line.substr(1));
      if (f.size() == 3 && f[0] == "objective" && f[1] == "offset") lp.objective_offset = parse_num(f[2], "offset comment");
      else if (lp.name.empty() && f.size() == 1) lp.name = f[0];
      continue;
    }
    for (auto& t : split(line)) tokens.push_back(t);
  }
  std::map<std::string, std::size_t> cols;
  auto column = [&](const std::string& n) {
    auto [it, fresh] = cols.try_emplace(n, lp.columns.size());
    if (fresh) {
      lp.columns.push_back(n);
      lp.objective.push_back(0.0);
    }
    return it->second;
  };
  std::size_t i = 0;
  auto at_keyword = [&]() {
    if (i >= tokens.size()) return true;
    std::string t = lower(tokens[i]);
    return t == "subject" || t == "st" || t == "s.t." || t == "bounds" || t == "end";
  };
  // Reads signed terms until a relation or keyword.
  auto read_terms = [&](std::vector<std::pair<std::size_t, double>>& terms) {
    double sign = 1, coef = 1;
    while (!at_keyword()) {
      const std::string& t = tokens[i];
      if (t == "<=" || t == "=<" || t == "<" || t == ">=" || t == "=" || t == "=>" || t == ">") return;
      ++i;
      if (t == "+") continue;
      if (t == "-") {
        sign = -sign;
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(t[0])) || t[0] == '.') {
        coef = parse_num(t, "LP expression");
        continue;
      }
      terms.emplace_back(column(t), sign * coef);
      sign = 1;
      coef = 1;
    }
  };
  bool minimize = false;
  while (i < tokens.size()) {
    std::string t = lower(tokens[i]);
    if (t == "maximize" || t == "max" || t == "minimize" || t == "min") {
      minimize = t[1] == 'i';
      ++i;
      if (i < tokens.size() && tokens[i].back() == ':') ++i;
      std::vector<std::pair<std::size_t, double>> terms;
      read_terms(terms);
      for (const auto& [c, v] : terms) lp.objective[c] += v;
    } else if (t == "subject" || t == "st" || t == "s.t.") {
      i += t == "subject" ? 2 : 1;
      while (!at_keyword()) {
        LinearProgram::Row r;
        if (tokens[i].back() != ':') throw InputError("constraint without a name near '" + tokens[i] + "'");
        r.name = tokens[i].substr(0, tokens[i].size() - 1);
        ++i;
        read_terms(r.terms);
        if (i + 1 >= tokens.size()) throw InputError("constraint " + r.name + " is cut short");
        if (tokens[i] != "<=" && tokens[i] != "=<" && tokens[i] != "<")
          throw InputError("only <= constraints are supported (" + r.name + ")");
        r.rhs = parse_num(tokens[i + 1], "constraint " + r.name);
        i += 2;
        std::sort(r.terms.begin(), r.terms.end());
        lp.rows.push_back(std::move(r));
      }
    } else if (t == "bounds") {
      throw InputError("Bounds section not supported");
    } else if (t == "end") {
      break;
    } else {
      throw InputError("unexpected token '" + tokens[i] + "' in LP file");
    }
  }
  if (minimize) {
    for (auto& c : lp.objective) c = -c;
    lp.objective_offset = -lp.objective_offset;
  }
  return lp;
}

ExternalSolution parse_solution(std::istream& in, const std::string& dialect) {
  ExternalSolution sol;
  std::string line;
  if (dialect == "pairs") {
    while (std::getline(in, line)) {
      auto f = split(line);
      if (f.empty() || f[0][0] == '#') continue;
      if (f.size() != 2) throw SolverError("solution line is not 'name value': " + line);
      if (lower(f[0]) == "objective")
        sol.objective = parse_num(f[1], "solution objective");
      else
        sol.values.emplace_back(f[0], parse_num(f[1], "solution value of " + f[0]));
    }
    return sol;
  }
  if (dialect == "highs") {
    bool primal = false;
    long remaining = -1;
    while (std::getline(in, line)) {
      auto f = split(line);
      if (f.empty()) continue;
      if (line.rfind("# Primal solution values", 0) == 0) {
        primal = true;
        continue;
      }
      if (!primal) continue;
      if (f[0] == "Objective" && f.size() == 2) {
        sol.objective = parse_num(f[1], "HiGHS objective");
      } else if (f[0] == "#" && f.size() == 3 && f[1] == "Columns") {
        remaining = static_cast<long>(parse_num(f[2], "HiGHS column count"));
      } else if (remaining > 0 && f.size() == 2) {
        sol.values.emplace_back(f[0], parse_num(f[1], "HiGHS value of " + f[0]));
        if (--remaining == 0) break;
      }
    }
    if (remaining != 0) throw SolverError("HiGHS solution file has no complete primal column section");
    return sol;
  }
  throw InputError("unknown solution dialect '" + dialect + "' (pairs, highs)");
}

std::optional<ExternalSolver> external_solver_from_env() {
  const char* cmd = std::getenv("SWMSIM_LP_SOLVER");
  if (!cmd || !*cmd) return std::nullopt;
  ExternalSolver s;
  s.command = cmd;
  if (const char* d = std::getenv("SWMSIM_LP_DIALECT"); d && *d) s.dialect = d;
  if (const char* f = std::getenv("SWMSIM_LP_FORMAT"); f && *f) s.format = f;
  return s;
}

LpSolution solve_external(const CyclicLpModel& model, const ExternalSolver& solver) {
  namespace fs = std::filesystem;
  static std::atomic<int> counter{0};
  if (solver.format != "mps" && solver.format != "lp") throw InputError("external format must be mps or lp");
  const fs::path dir = fs::temp_directory_path() /
                       ("swmsim-lp-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  fs::create_directories(dir);
  const fs::path input = dir / (solver.format == "mps" ? "model.mps" : "model.lp");
  const fs::path output = dir / "solution.txt";
  const fs::path log = dir / "solver.log";
  {
    std::ofstream f(input);
    if (!f) throw SolverError("cannot write " + input.string());
    if (solver.format == "mps")
      write_mps(model.program(), f);
    else
      write_lp_text(model.program(), f);
  }
  std::string cmd = solver.command;
  for (auto [key, value] : {std::pair<std::string, std::string>{"{input}", input.string()}, {"{output}", output.string()}}) {
    for (std::size_t pos; (pos = cmd.find(key)) != std::string::npos;) cmd.replace(pos, key.size(), value);
  }
  const int rc = std::system(("(" + cmd + ") > '" + log.string() + "' 2>&1").c_str());
  std::string captured;
  {
    std::ifstream f(log);
    std::stringstream ss;
    ss << f.rdbuf();
    captured = ss.str();
  }
  auto fail = [&](const std::string& why) {
    std::error_code ec;
    fs::remove_all(dir, ec);
    throw SolverError("external solver " + why + " (command: " + cmd + ")\n" + captured);
  };
  if (rc != 0) fail("exited with status " + std::to_string(rc));
  std::ifstream sf(output);
  if (!sf) fail("wrote no solution file");
  ExternalSolution ext;
  try {
    ext = parse_solution(sf, solver.dialect);
  } catch (const Error& e) {
    fail(std::string("output could not be parsed: ") + e.what());
  }
  if (ext.values.empty() && !ext.objective) fail("wrote an empty solution file");
  std::vector<double> a(static_cast<std::size_t>(model.k), 0.0);
  for (const auto& [name, v] : ext.values) {
    if (name.rfind("a_", 0) != 0) continue;
    long t = std::strtol(name.c_str() + 2, nullptr, 10);
    if (t < 1 || t > model.k) continue;
    a[static_cast<std::size_t>(t - 1)] = v;  // absent columns stay at zero
  }
  std::error_code ec;
  fs::remove_all(dir, ec);

  LpSolution sol;
  sol.a = a;
  for (double x : a) sol.objective += x;
  sol.objective += model.b_sum();
  if (ext.objective) {
    const double with = *ext.objective, without = *ext.objective + model.b_sum();
    const double tol = 1e-6 * std::max(1.0, std::abs(sol.objective));
    if (std::abs(with - sol.objective) > tol && std::abs(without - sol.objective) > tol)
      throw SolverError("external objective " + num(*ext.objective) + " does not match its a-vector (" +
                        num(sol.objective) + ")");
  }
  sol.provenance = "external";
  sol.solver = cmd.substr(0, cmd.find(' '));
  sol.D_cap = model.D_cap;
  sol.max_residual = max_violation(model, a);
  return sol;
}

}  // namespace swmsim
