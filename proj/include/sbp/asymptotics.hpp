#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "sbp/solver.hpp"

namespace sbp {

/// One row of the a -> 0 continuation study.
struct SweepRow {
  double a = 0.0;
  double J = 0.0;
  double u_dist_h1 = 0.0;      // ||u^a - u^0||_{H1(omega)}
  double phi_dist_dgrad = 0.0; // ||grad(phi^a - phi^0)||_{L2}
  double a_lap_phi_l2 = 0.0;   // a ||Delta phi^a||_{L2}
  bool converged = false;
};

struct SweepReport {
  std::vector<SweepRow> rows;  // sorted by decreasing a
  double u0_h1 = 0.0;          // ||u^0||_{H1(omega)} of the limit solution
  double J0 = 0.0;
  bool reference_converged = false;
};

namespace detail {
// L2 norm of Delta phi excluding the boundary node: phi has a Coulomb tail,
// so the Dirichlet ghost at r_max does not apply to it.
inline double lap_l2_interior(const RadialGrid& g, const RadialField& phi) {
  RadialField lap = radial_laplacian(g, phi);
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < g.n; ++i)
    s += g.weights[i] * lap.values[i] * lap.values[i];
  return std::sqrt(s);
}
}  // namespace detail

/// Solve the a = 0 (Schroedinger-Poisson-Slater) reference once, then
/// continue through decreasing a with warm starts, recording convergence
/// measures of (u^a, phi^a) -> (u^0, phi^0).
inline SweepReport sweep_a(const SBPParams& params_base,
                           const std::vector<double>& a_list,
                           const RadialGrid& g, const SolveOptions& opts = {}) {
  params_base.validate();
  if (a_list.empty()) throw std::invalid_argument("sweep_a: empty a_list");
  for (std::size_t i = 0; i < a_list.size(); ++i) {
    if (!(a_list[i] > 0.0))
      throw std::invalid_argument("sweep_a: a values must be > 0");
    if (i > 0 && !(a_list[i] < a_list[i - 1]))
      throw std::invalid_argument("sweep_a: a_list must be decreasing");
  }

  SweepReport report;
  SBPParams p0 = params_base;
  p0.a = 0.0;
  SolveResult ref = solve_ground_state(p0, g, opts);
  report.reference_converged = ref.converged;
  report.u0_h1 = norm(g, ref.u, NormKind::H1w, params_base.omega);
  report.J0 = ref.report.J;

  RadialField rho0(g);
  for (std::size_t i = 0; i < g.n; ++i)
    rho0.values[i] = ref.u.values[i] * ref.u.values[i];
  RadialField phi0 = solve_phi(g, rho0, KernelSpec{0.0});

  const RadialField* warm = &ref.u;
  std::vector<RadialField> kept;
  kept.reserve(a_list.size());
  for (double a : a_list) {
    SBPParams pa = params_base;
    pa.a = a;
    SolveResult ra = solve_ground_state(pa, g, opts, warm);
    SweepRow row;
    row.a = a;
    row.converged = ra.converged;
    row.J = ra.report.J;

    RadialField du(g), rho(g);
    for (std::size_t i = 0; i < g.n; ++i) {
      du.values[i] = ra.u.values[i] - ref.u.values[i];
      rho.values[i] = ra.u.values[i] * ra.u.values[i];
    }
    row.u_dist_h1 = norm(g, du, NormKind::H1w, params_base.omega);
    RadialField phia = solve_phi(g, rho, KernelSpec{a});
    RadialField dphi(g);
    for (std::size_t i = 0; i < g.n; ++i)
      dphi.values[i] = phia.values[i] - phi0.values[i];
    row.phi_dist_dgrad = norm(g, dphi, NormKind::Dgrad);
    row.a_lap_phi_l2 = a * detail::lap_l2_interior(g, phia);

    report.rows.push_back(row);
    kept.push_back(ra.u);
    warm = &kept.back();
  }
  return report;
}

}  // namespace sbp
