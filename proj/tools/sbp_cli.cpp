// Command-line driver: computes radial ground states of the screened
// Schroedinger-Poisson equation -Delta u + omega u - mu (K * u^2) u = u^{p-1}
// with K(x) = (1 - e^{-|x|/a})/|x|, runs the a -> 0 continuation study,
// validates the reduced kernels against brute-force oracles, and checks
// qualitative properties of stored fields.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>

#include "CLI11.hpp"
#include "sbp/asymptotics.hpp"
#include "sbp/diagnostics.hpp"
#include "sbp/io.hpp"
#include "sbp/oracles.hpp"
#include "sbp/solver.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;    // validation / convergence failure
constexpr int kExitConfig = 2;  // configuration error

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
}

struct CommonArgs {
  std::string config = "default";
  std::string out_dir;
  std::string format;
  std::int64_t seed = -1;
};

sbp::RunConfig resolve_config(const CommonArgs& args) {
  sbp::RunConfig cfg = sbp::load_config(args.config);
  if (!args.out_dir.empty()) cfg.output_directory = args.out_dir;
  if (args.seed >= 0) cfg.solver.seed = static_cast<std::uint64_t>(args.seed);
  if (!args.format.empty()) {
    if (args.format == "csv") {
      cfg.format_csv = true;
      cfg.format_json = false;
    } else if (args.format == "json") {
      cfg.format_csv = false;
      cfg.format_json = true;
    } else if (args.format == "both") {
      cfg.format_csv = true;
      cfg.format_json = true;
    } else {
      throw std::invalid_argument("--format must be csv, json, or both");
    }
  }
  return cfg;
}

int run_solve(const CommonArgs& args) {
  sbp::RunConfig cfg = resolve_config(args);
  sbp::RadialGrid grid = cfg.make_run_grid();
  sbp::SolveResult res = sbp::solve_ground_state(cfg.problem, grid, cfg.solver);
  sbp::DiagnosticsReport diag =
      sbp::invariant_suite(cfg.problem, grid, res.u, 1000, cfg.solver.seed);

  std::filesystem::create_directories(cfg.output_directory);
  const std::filesystem::path dir(cfg.output_directory);
  if (cfg.format_json) {
    write_file(dir / "solve.json",
               sbp::solve_result_to_json(cfg, res, diag).dump(2) + "\n");
  }
  if (cfg.format_csv) {
    sbp::RadialField rho(grid);
    for (std::size_t i = 0; i < grid.n; ++i)
      rho.values[i] = res.u.values[i] * res.u.values[i];
    sbp::RadialField phi = sbp::solve_phi(grid, rho, cfg.problem.kernel());
    write_file(dir / "field.csv", sbp::field_csv(grid, res.u, phi));
  }

  std::cout << "solve: converged=" << (res.converged ? "true" : "false")
            << " iterations=" << res.iterations << " J=" << res.report.J
            << " nehari=" << res.report.nehari
            << " decay_slope=" << res.decay_slope << "\n";
  return res.converged ? kExitOk : kExitFail;
}

int run_sweep(const CommonArgs& args) {
  sbp::RunConfig cfg = resolve_config(args);
  sbp::RadialGrid grid = cfg.make_run_grid();
  sbp::SweepReport rep =
      sbp::sweep_a(cfg.problem, cfg.sweep_a_list, grid, cfg.solver);

  std::filesystem::create_directories(cfg.output_directory);
  const std::filesystem::path dir(cfg.output_directory);
  if (cfg.format_csv) write_file(dir / "sweep.csv", sbp::sweep_csv(rep));
  if (cfg.format_json)
    write_file(dir / "sweep.json", sbp::sweep_to_json(rep).dump(2) + "\n");

  bool all = rep.reference_converged;
  for (const sbp::SweepRow& row : rep.rows) all = all && row.converged;
  std::cout << "sweep-a: rows=" << rep.rows.size()
            << " all_converged=" << (all ? "true" : "false")
            << " final_u_dist=" << rep.rows.back().u_dist_h1 << "\n";
  return all ? kExitOk : kExitFail;
}

struct Gate {
  std::string name;
  bool pass;
};

int run_validate(const CommonArgs& args) {
  sbp::RunConfig cfg = resolve_config(args);
  std::vector<Gate> gates;

  {  // reduced kernels vs angular quadrature at seeded points
    std::mt19937_64 rng(cfg.solver.seed + 101);
    std::uniform_real_distribution<double> rad(0.05, 10.0), scr(0.05, 5.0);
    bool ok = true;
    for (int k = 0; k < 20; ++k) {
      double r = rad(rng), s = rad(rng);
      const double a = scr(rng);
      if (k < 4) s = r;  // diagonal points
      const sbp::KernelSpec spec{a};
      const double g0 = sbp::angular_oracle_G(r, s, a);
      const double h0 = sbp::angular_oracle_H(r, s, a);
      ok = ok && std::abs(sbp::reduced_kernel_G(r, s, spec) - g0) <= 1e-7 * std::abs(g0);
      ok = ok && std::abs(sbp::reduced_kernel_H(r, s, spec) - h0) <= 1e-7 * (std::abs(h0) + 1e-300);
    }
    gates.push_back({"kernel_reduction", ok});
  }

  {  // potential solve vs 2D quadrature on a Gaussian density
    sbp::RadialGrid g = sbp::make_grid(2048, 14.0, 2.0);
    sbp::RadialField rho(g);
    for (std::size_t i = 0; i < g.n; ++i)
      rho.values[i] = std::exp(-g.nodes[i] * g.nodes[i]);
    bool ok = true;
    sbp::RadialField phi = sbp::solve_phi(g, rho, sbp::KernelSpec{0.5});
    auto rho_fn = [](double s) { return std::exp(-s * s); };
    for (int k = 1; k <= 5; ++k) {
      const std::size_t i = (k * (g.n - 2)) / 6;
      const double exact = sbp::phi_oracle(g.nodes[i], 0.5, rho_fn, 14.0, 4001, 801);
      ok = ok && std::abs(phi.values[i] - exact) <= 1e-5 * exact;
    }
    sbp::RadialField phi0 = sbp::solve_phi(g, rho, sbp::KernelSpec{0.0});
    for (int k = 1; k <= 5; ++k) {
      const std::size_t i = (k * (g.n - 2)) / 6;
      const double exact = sbp::phi_oracle_coulomb_gaussian(g.nodes[i]);
      ok = ok && std::abs(phi0.values[i] - exact) <= 2e-6 * exact;
    }
    gates.push_back({"potential_solve", ok});
  }

  {  // functional derivative vs central differences
    sbp::RadialGrid g = sbp::make_grid(256, 12.0, 2.0);
    sbp::RadialField u(g), v(g);
    for (std::size_t i = 0; i + 1 < g.n; ++i) {
      const double r = g.nodes[i];
      u.values[i] = std::exp(-r * r);
      v.values[i] = std::exp(-(r - 1.5) * (r - 1.5));
    }
    const double err =
        sbp::fd_gradient_check(cfg.problem, g, u, v, {1e-4, 1e-5});
    gates.push_back({"gradient_check", err <= 1e-6});
  }

  {  // double integral vs Monte-Carlo
    sbp::RadialGrid g = sbp::make_grid(512, 12.0, 2.0);
    sbp::RadialField rho(g);
    for (std::size_t i = 0; i < g.n; ++i)
      rho.values[i] = std::exp(-g.nodes[i] * g.nodes[i]);
    const double E = sbp::double_integral_E(g, rho, sbp::KernelSpec{1.0});
    sbp::MCEstimate mc = sbp::mc_double_integral(
        {sbp::GaussianComponent{1.0, 1.0}}, 1.0, 2'000'000, cfg.solver.seed + 7);
    gates.push_back({"double_integral_mc", std::abs(E - mc.value) <= 3.0 * mc.sigma});
  }

  bool all = true;
  for (const Gate& gate : gates) {
    std::cout << (gate.pass ? "[PASS] " : "[FAIL] ") << gate.name << "\n";
    all = all && gate.pass;
  }
  return all ? kExitOk : kExitFail;
}

int run_sobolev(const CommonArgs& args) {
  sbp::RunConfig cfg = resolve_config(args);
  sbp::RadialGrid g = sbp::make_grid(cfg.sobolev_n, cfg.sobolev_r_max, cfg.grid_grading);
  sbp::SobolevReport rep = sbp::sobolev_constant_report(g);
  const double rel = std::abs(rep.grad_sq - rep.l6_pow6) / rep.grad_sq;
  std::cout << "sobolev: grad_sq=" << rep.grad_sq << " l6_pow6=" << rep.l6_pow6
            << " rel_mismatch=" << rel
            << " warning=" << (rep.r_max_warning ? "true" : "false") << "\n";
  return rep.r_max_warning ? kExitFail : kExitOk;
}

int run_check(const CommonArgs& args, const std::string& field_path) {
  sbp::RunConfig cfg = resolve_config(args);
  auto [r, uvals] = sbp::read_field_csv(field_path);
  sbp::RadialGrid grid = sbp::make_grid(r.size(), r.back(), cfg.grid_grading);
  for (std::size_t i = 0; i < grid.n; ++i) {
    if (std::abs(grid.nodes[i] - r[i]) > 1e-9 * (1.0 + grid.nodes[i]))
      throw std::invalid_argument(
          "field file: radii do not match grid.grading=" +
          std::to_string(cfg.grid_grading) + " on [0, " + std::to_string(r.back()) + "]");
  }
  sbp::RadialField u(grid);
  u.values = uvals;
  sbp::DiagnosticsReport diag =
      sbp::invariant_suite(cfg.problem, grid, u, 1000, cfg.solver.seed);
  std::cout << sbp::diagnostics_to_json(diag).dump(2) << "\n";
  const bool ok = diag.trivial_field ||
                  (diag.phi_nonneg_ok != sbp::CheckFlag::Fail &&
                   diag.kernel_domination_ok != sbp::CheckFlag::Fail &&
                   diag.lemma41_ok != sbp::CheckFlag::Fail &&
                   diag.lemma42_ok != sbp::CheckFlag::Fail);
  return ok ? kExitOk : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"radial ground states of the screened Schroedinger-Poisson equation"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string field_path;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", args.config,
                    "config file path, or 'default' for built-in defaults");
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--format", args.format, "csv | json | both");
    cmd->add_option("--seed", args.seed, "RNG seed (overrides config)");
  };

  CLI::App* solve = app.add_subcommand("solve", "compute a ground state");
  CLI::App* sweep = app.add_subcommand("sweep-a", "a -> 0 continuation study");
  CLI::App* validate = app.add_subcommand("validate", "run oracle gates");
  CLI::App* sobolev = app.add_subcommand("sobolev", "extremal-profile identity report");
  CLI::App* check = app.add_subcommand("check", "diagnostics on a stored field");
  for (CLI::App* cmd : {solve, sweep, validate, sobolev, check}) add_common(cmd);
  check->add_option("--field", field_path, "field CSV (r,u,phi)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (solve->parsed()) return run_solve(args);
    if (sweep->parsed()) return run_sweep(args);
    if (validate->parsed()) return run_validate(args);
    if (sobolev->parsed()) return run_sobolev(args);
    if (check->parsed()) return run_check(args, field_path);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
  return kExitConfig;
}
