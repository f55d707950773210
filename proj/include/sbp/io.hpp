#pragma once

// Configuration parsing and result serialization for the command-line tool.
// Config files are flat text with dotted keys ("problem.omega = 1.0");
// results are emitted as JSON with a stable key order and as CSV field
// tables with full double precision.

#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "sbp/asymptotics.hpp"
#include "sbp/diagnostics.hpp"
#include "sbp/solver.hpp"

namespace sbp {

using ordered_json = nlohmann::ordered_json;

/// Everything the CLI needs to run one job.
struct RunConfig {
  SBPParams problem;
  std::size_t grid_n = 2048;
  double grid_r_max = 40.0;
  double grid_grading = 2.0;
  SolveOptions solver;
  std::string output_directory = ".";
  bool format_csv = true;
  bool format_json = true;
  std::vector<double> sweep_a_list = {1.0, 0.5, 0.25, 0.125, 0.0625};
  double sobolev_r_max = 200.0;
  std::size_t sobolev_n = 8192;

  RadialGrid make_run_grid() const {
    return make_grid(grid_n, grid_r_max, grid_grading);
  }
};

namespace io_detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: key '" + key + "' has non-numeric value '" + v + "'");
  }
  if (pos != v.size())
    throw std::invalid_argument("config: key '" + key + "' has trailing characters in '" + v + "'");
  return out;
}

inline std::size_t parse_size(const std::string& key, const std::string& v) {
  const double d = parse_double(key, v);
  if (d < 0.0 || d != static_cast<double>(static_cast<std::size_t>(d)))
    throw std::invalid_argument("config: key '" + key + "' must be a nonnegative integer");
  return static_cast<std::size_t>(d);
}

inline std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty())
      throw std::invalid_argument("config: key '" + key + "' has an empty list element");
    out.push_back(parse_double(key, item));
  }
  if (out.empty())
    throw std::invalid_argument("config: key '" + key + "' must be a nonempty list");
  return out;
}

inline std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace io_detail

/// Parse dotted-key text. Lines: 'section.key = value'; '#' comments and
/// blank lines ignored. Unknown keys are rejected by name.
inline RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  static const std::set<std::string> known = {
      "problem.omega",   "problem.mu",       "problem.a",
      "problem.p",       "grid.n",           "grid.r_max",
      "grid.grading",    "solver.tol",       "solver.max_iter",
      "solver.step0",    "solver.backtrack", "solver.seed",
      "output.directory", "output.formats",  "sweep.a_list",
      "sobolev.r_max",   "sobolev.n"};

  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = io_detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                  " is not of the form 'key = value'");
    const std::string key = io_detail::trim(line.substr(0, eq));
    const std::string val = io_detail::trim(line.substr(eq + 1));
    if (!known.count(key))
      throw std::invalid_argument("config: unknown key '" + key + "'");
    if (val.empty())
      throw std::invalid_argument("config: key '" + key + "' has no value");

    using io_detail::parse_double;
    using io_detail::parse_size;
    if (key == "problem.omega") cfg.problem.omega = parse_double(key, val);
    else if (key == "problem.mu") cfg.problem.mu = parse_double(key, val);
    else if (key == "problem.a") cfg.problem.a = parse_double(key, val);
    else if (key == "problem.p") cfg.problem.p = parse_double(key, val);
    else if (key == "grid.n") cfg.grid_n = parse_size(key, val);
    else if (key == "grid.r_max") cfg.grid_r_max = parse_double(key, val);
    else if (key == "grid.grading") cfg.grid_grading = parse_double(key, val);
    else if (key == "solver.tol") cfg.solver.tol = parse_double(key, val);
    else if (key == "solver.max_iter")
      cfg.solver.max_iter = static_cast<int>(parse_size(key, val));
    else if (key == "solver.step0") cfg.solver.step0 = parse_double(key, val);
    else if (key == "solver.backtrack") cfg.solver.backtrack = parse_double(key, val);
    else if (key == "solver.seed")
      cfg.solver.seed = static_cast<std::uint64_t>(parse_size(key, val));
    else if (key == "output.directory") cfg.output_directory = val;
    else if (key == "output.formats") {
      cfg.format_csv = false;
      cfg.format_json = false;
      for (const std::string& f : [&] {
             std::vector<std::string> out;
             std::stringstream fs(val);
             std::string item;
             while (std::getline(fs, item, ',')) out.push_back(io_detail::trim(item));
             return out;
           }()) {
        if (f == "csv") cfg.format_csv = true;
        else if (f == "json") cfg.format_json = true;
        else
          throw std::invalid_argument("config: output.formats accepts 'csv' and 'json', got '" + f + "'");
      }
    } else if (key == "sweep.a_list") cfg.sweep_a_list = io_detail::parse_list(key, val);
    else if (key == "sobolev.r_max") cfg.sobolev_r_max = parse_double(key, val);
    else if (key == "sobolev.n") cfg.sobolev_n = parse_size(key, val);
  }

  // cross-field validation with messages naming the offending key
  try {
    cfg.problem.validate();
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("config: problem.*: ") + e.what() +
                                " (omega > 0, mu > 0, a >= 0, p in (2, 6])");
  }
  try {
    cfg.solver.validate();
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("config: solver.*: ") + e.what());
  }
  if (cfg.grid_n < 16) throw std::invalid_argument("config: grid.n must be >= 16");
  if (!(cfg.grid_r_max > 0.0))
    throw std::invalid_argument("config: grid.r_max must be > 0");
  if (!(cfg.grid_grading >= 1.0 && cfg.grid_grading <= 4.0))
    throw std::invalid_argument("config: grid.grading must be in [1, 4]");
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  if (path == "default") return RunConfig{};  // (omega, mu, a, p) = (1, 1, 1, 4)
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

inline ordered_json diagnostics_to_json(const DiagnosticsReport& d) {
  ordered_json j;
  j["trivial_field"] = d.trivial_field;
  j["decay_slope"] = d.decay_slope;
  j["decay_bound_ok"] = to_string(d.decay_bound_ok);
  j["positivity_ok"] = to_string(d.positivity_ok);
  j["monotone_ok"] = to_string(d.monotone_ok);
  j["radial_bound_ok"] = to_string(d.radial_bound_ok);
  j["radial_bound_margin"] = d.radial_bound_margin;
  j["phi_nonneg_ok"] = to_string(d.phi_nonneg_ok);
  j["kernel_domination_ok"] = to_string(d.kernel_domination_ok);
  j["lemma41_ok"] = to_string(d.lemma41_ok);
  j["lemma42_ok"] = to_string(d.lemma42_ok);
  j["pohozaev_rel"] = d.pohozaev_rel;
  j["nehari_rel"] = d.nehari_rel;
  j["critical_level_ok"] = to_string(d.critical_level_ok);
  return j;
}

/// SolveResult JSON with a fixed key set and stable key order.
inline ordered_json solve_result_to_json(const RunConfig& cfg,
                                         const SolveResult& res,
                                         const DiagnosticsReport& diag) {
  ordered_json j;
  j["params"] = {{"omega", cfg.problem.omega},
                 {"mu", cfg.problem.mu},
                 {"a", cfg.problem.a},
                 {"p", cfg.problem.p}};
  j["grid"] = {{"n", cfg.grid_n},
               {"r_max", cfg.grid_r_max},
               {"grading", cfg.grid_grading}};
  j["energy"] = {{"kinetic", res.report.kinetic},
                 {"mass", res.report.mass},
                 {"nonlocal", res.report.nonlocal},
                 {"power", res.report.power},
                 {"J", res.report.J},
                 {"nehari", res.report.nehari},
                 {"pohozaev", res.report.pohozaev},
                 {"i_val", res.report.i_val}};
  j["converged"] = res.converged;
  j["iterations"] = res.iterations;
  j["c_estimate"] = res.c_estimate;
  j["decay_slope"] = res.decay_slope;
  j["nehari_guaranteed"] = res.nehari_guaranteed;
  j["critical"] = res.critical;
  j["diagnostics"] = diagnostics_to_json(diag);
  return j;
}

/// Field table: header r,u,phi, one node per line, 17 significant digits.
inline std::string field_csv(const RadialGrid& g, const RadialField& u,
                             const RadialField& phi) {
  std::string out = "r,u,phi\n";
  for (std::size_t i = 0; i < g.n; ++i) {
    out += io_detail::fmt17(g.nodes[i]);
    out += ',';
    out += io_detail::fmt17(u.values[i]);
    out += ',';
    out += io_detail::fmt17(phi.values[i]);
    out += '\n';
  }
  return out;
}

inline std::string sweep_csv(const SweepReport& rep) {
  std::string out = "a,J,u_dist_h1,phi_dist_dgrad,a_lap_phi_l2,converged\n";
  for (const SweepRow& row : rep.rows) {
    out += io_detail::fmt17(row.a);
    out += ',';
    out += io_detail::fmt17(row.J);
    out += ',';
    out += io_detail::fmt17(row.u_dist_h1);
    out += ',';
    out += io_detail::fmt17(row.phi_dist_dgrad);
    out += ',';
    out += io_detail::fmt17(row.a_lap_phi_l2);
    out += ',';
    out += row.converged ? "1" : "0";
    out += '\n';
  }
  return out;
}

inline ordered_json sweep_to_json(const SweepReport& rep) {
  ordered_json j;
  j["u0_h1"] = rep.u0_h1;
  j["J0"] = rep.J0;
  j["reference_converged"] = rep.reference_converged;
  j["rows"] = ordered_json::array();
  for (const SweepRow& row : rep.rows) {
    ordered_json r;
    r["a"] = row.a;
    r["J"] = row.J;
    r["u_dist_h1"] = row.u_dist_h1;
    r["phi_dist_dgrad"] = row.phi_dist_dgrad;
    r["a_lap_phi_l2"] = row.a_lap_phi_l2;
    r["converged"] = row.converged;
    j["rows"].push_back(r);
  }
  return j;
}

/// Read a field table written by field_csv (for the `check` subcommand).
/// Returns (r, u) columns; phi is recomputed from u.
inline std::pair<std::vector<double>, std::vector<double>> read_field_csv(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("field file: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || io_detail::trim(line) != "r,u,phi")
    throw std::invalid_argument("field file: expected header 'r,u,phi'");
  std::vector<double> r, u;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = io_detail::trim(line);
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string a, b, c;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') ||
        !std::getline(ss, c, ','))
      throw std::invalid_argument("field file: malformed line " +
                                  std::to_string(lineno));
    r.push_back(io_detail::parse_double("r", io_detail::trim(a)));
    u.push_back(io_detail::parse_double("u", io_detail::trim(b)));
  }
  if (r.size() < 16)
    throw std::invalid_argument("field file: needs at least 16 rows");
  return {r, u};
}

}  // namespace sbp
