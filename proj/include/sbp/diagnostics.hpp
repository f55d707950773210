#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "sbp/solver.hpp"

namespace sbp {

/// Tri-state check result: some predicates have preconditions.
enum class CheckFlag { Pass, Fail, NotApplicable };

inline const char* to_string(CheckFlag f) {
  switch (f) {
    case CheckFlag::Pass: return "pass";
    case CheckFlag::Fail: return "fail";
    case CheckFlag::NotApplicable: return "n/a";
  }
  return "?";
}

struct DiagnosticsReport {
  bool trivial_field = false;
  double decay_slope = 0.0;
  CheckFlag decay_bound_ok = CheckFlag::NotApplicable;  // slope <= -sqrt(w)/2 + 0.05
  CheckFlag positivity_ok = CheckFlag::NotApplicable;
  CheckFlag monotone_ok = CheckFlag::NotApplicable;
  CheckFlag radial_bound_ok = CheckFlag::NotApplicable;
  double radial_bound_margin = 0.0;
  CheckFlag phi_nonneg_ok = CheckFlag::NotApplicable;
  CheckFlag kernel_domination_ok = CheckFlag::NotApplicable;
  CheckFlag lemma41_ok = CheckFlag::NotApplicable;
  CheckFlag lemma42_ok = CheckFlag::NotApplicable;
  double pohozaev_rel = 0.0;
  double nehari_rel = 0.0;
  CheckFlag critical_level_ok = CheckFlag::NotApplicable;  // p = 6 only
};

/// Least-squares slope of ln u over the outer tail_fraction of radii.
inline double decay_slope(const RadialGrid& g, const RadialField& u,
                          double tail_fraction = 0.25) {
  detail::require_grid(g, u, "decay_slope");
  return detail::fit_tail_slope(g, u, tail_fraction);
}

struct RadialBoundResult {
  CheckFlag flag = CheckFlag::NotApplicable;
  double margin = 0.0;  // worst relative margin (bound - u)/bound
};

/// Radial-lemma bound u(r) <= r^{-3/2} (3/(4 pi))^{1/2} ||u||_{L^2} for
/// nonnegative nonincreasing fields.
inline RadialBoundResult radial_bound_check(const RadialGrid& g,
                                            const RadialField& u) {
  detail::require_grid(g, u, "radial_bound_check");
  double umax = 0.0;
  for (double v : u.values) umax = std::max(umax, std::abs(v));
  const double slack = 1e-12 * umax;
  for (std::size_t i = 0; i < g.n; ++i) {
    if (u.values[i] < -slack) return {CheckFlag::NotApplicable, 0.0};
    if (i + 1 < g.n && u.values[i + 1] > u.values[i] + slack)
      return {CheckFlag::NotApplicable, 0.0};
  }
  const double l2 = norm(g, u, NormKind::L2);
  const double coef = std::sqrt(3.0 / (4.0 * std::numbers::pi)) * l2;
  RadialBoundResult res;
  res.flag = CheckFlag::Pass;
  res.margin = 1.0;
  for (std::size_t i = 1; i < g.n; ++i) {
    const double bound = coef * std::pow(g.nodes[i], -1.5);
    const double m = (bound - u.values[i]) / bound;
    res.margin = std::min(res.margin, m);
    if (u.values[i] > bound) res.flag = CheckFlag::Fail;
  }
  return res;
}

/// Extremal profile U = 3^{1/4} (1+r^2)^{-1/2}: both ||grad U||^2 and
/// ||U||_6^6 equal K^{3/2}. The profile has a pure 1/r far field, so the
/// integrals outside r_max are appended in closed form from the boundary
/// value (|grad|^2 tail = 4 pi c^2 / R, U^6 tail = 4 pi c^6 / (3 R^3) with
/// c = R U(R)); the residual mismatch measures grid plus far-field error.
struct SobolevReport {
  double grad_sq = 0.0;
  double l6_pow6 = 0.0;
  bool r_max_warning = false;  // mismatch above 1%
  double k32() const { return grad_sq; }
};

inline SobolevReport sobolev_constant_report(const RadialGrid& g) {
  RadialField U(g);
  const double amp = std::pow(3.0, 0.25);
  for (std::size_t i = 0; i < g.n; ++i)
    U.values[i] = amp / std::sqrt(1.0 + g.nodes[i] * g.nodes[i]);
  SobolevReport rep;
  constexpr double four_pi = 4.0 * std::numbers::pi;
  const double R = g.r_max;
  const double c = R * U.values[g.n - 1];
  const double dg = norm(g, U, NormKind::Dgrad);
  rep.grad_sq = dg * dg + four_pi * c * c / R;
  double s = 0.0;
  for (std::size_t i = 0; i < g.n; ++i) {
    const double v = U.values[i];
    const double v3 = v * v * v;
    s += g.weights[i] * v3 * v3;
  }
  const double c3 = c * c * c;
  rep.l6_pow6 = s + four_pi * c3 * c3 / (3.0 * R * R * R);
  rep.r_max_warning =
      std::abs(rep.grad_sq - rep.l6_pow6) > 0.01 * rep.grad_sq;
  return rep;
}

/// Lemma 3.3 level bound for the critical exponent: 0 < J(u) < K^{3/2}/3.
inline CheckFlag critical_level_check(const SBPParams& params,
                                      const SolveResult& result,
                                      const SobolevReport& sobolev) {
  if (params.p != 6.0 || !result.converged) return CheckFlag::NotApplicable;
  const double c = result.c_estimate;
  return (c > 0.0 && c < sobolev.k32() / 3.0) ? CheckFlag::Pass
                                              : CheckFlag::Fail;
}

/// Full verification bundle for a field: qualitative theorems, the fibering
/// inequalities on sampled tau, kernel domination, and the variational
/// identities. Pure in (params, grid, u, n_samples, seed).
inline DiagnosticsReport invariant_suite(const SBPParams& params,
                                         const RadialGrid& g,
                                         const RadialField& u,
                                         int n_samples = 1000,
                                         std::uint64_t seed = 0) {
  params.validate();
  detail::require_grid(g, u, "invariant_suite");
  DiagnosticsReport rep;

  double umax = 0.0;
  for (double v : u.values) umax = std::max(umax, std::abs(v));
  if (umax == 0.0) {
    rep.trivial_field = true;
    return rep;
  }

  // Positivity and radial monotonicity (interior; the last node is the
  // Dirichlet truncation).
  {
    bool pos = true, mono = true;
    const double slack = 1e-12 * umax;
    for (std::size_t i = 0; i + 1 < g.n; ++i) {
      if (!(u.values[i] > 0.0)) pos = false;
      if (u.values[i + 1] > u.values[i] + slack) mono = false;
    }
    if (u.values[g.n - 1] < 0.0) pos = false;
    rep.positivity_ok = pos ? CheckFlag::Pass : CheckFlag::Fail;
    rep.monotone_ok = mono ? CheckFlag::Pass : CheckFlag::Fail;
  }

  auto rb = radial_bound_check(g, u);
  rep.radial_bound_ok = rb.flag;
  rep.radial_bound_margin = rb.margin;

  // Decay fit; only meaningful for positive decaying tails.
  try {
    rep.decay_slope = decay_slope(g, u);
    rep.decay_bound_ok =
        rep.decay_slope <= -0.5 * std::sqrt(params.omega) + 0.05
            ? CheckFlag::Pass
            : CheckFlag::Fail;
  } catch (const std::exception&) {
    rep.decay_bound_ok = CheckFlag::NotApplicable;
  }

  // phi >= 0 and kernel domination int phi_a u^2 <= int phi_0 u^2.
  RadialField rho(g);
  for (std::size_t i = 0; i < g.n; ++i) {
    const double v = u.values[i];
    rho.values[i] = v * v;
  }
  RadialField phi_a = solve_phi(g, rho, params.kernel());
  {
    bool ok = true;
    for (double v : phi_a.values)
      if (v < 0.0) ok = false;
    rep.phi_nonneg_ok = ok ? CheckFlag::Pass : CheckFlag::Fail;
  }
  if (params.a > 0.0) {
    RadialField phi_0 = solve_phi(g, rho, KernelSpec{0.0});
    double da = 0.0, d0 = 0.0;
    for (std::size_t i = 0; i < g.n; ++i) {
      da += g.weights[i] * phi_a.values[i] * rho.values[i];
      d0 += g.weights[i] * phi_0.values[i] * rho.values[i];
    }
    rep.kernel_domination_ok =
        da <= d0 * (1.0 + 1e-12) ? CheckFlag::Pass : CheckFlag::Fail;
  }

  // Fibering inequalities on log-uniform tau samples.
  {
    FiberComponents c = fiber_components(params, g, u);
    rep.nehari_rel = std::abs(c.nehari()) / c.Q();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    if (params.p >= 4.0) {
      bool ok41 = true, ok42 = true;
      const double Ju = c.J();
      for (int k = 0; k < n_samples; ++k) {
        const double tau = std::pow(10.0, uni(rng));
        const double f41 = 4.0 * std::pow(tau, params.p) -
                           params.p * std::pow(tau, 4.0) + params.p - 4.0;
        if (f41 < -1e-10 * (4.0 * std::pow(tau, params.p) + params.p + 4.0))
          ok41 = false;
        const double t2 = tau * tau;
        const double rhs = c.J_at(tau) +
                           0.25 * (1.0 - t2 * t2) * c.nehari() +
                           0.25 * (1.0 - t2) * (1.0 - t2) * c.Q();
        const double scale = std::abs(Ju) + std::abs(c.J_at(tau)) +
                             std::abs(c.nehari()) + c.Q();
        if (Ju - rhs < -1e-10 * scale) ok42 = false;
      }
      rep.lemma41_ok = ok41 ? CheckFlag::Pass : CheckFlag::Fail;
      rep.lemma42_ok = ok42 ? CheckFlag::Pass : CheckFlag::Fail;
    }
  }

  // Variational identities from the full report.
  {
    EnergyReport er = energy_report(params, g, u);
    const double scale = std::abs(er.kinetic) + std::abs(er.mass) +
                         std::abs(er.nonlocal) + std::abs(er.power);
    rep.pohozaev_rel = scale > 0.0 ? std::abs(er.pohozaev) / scale : 0.0;
  }
  return rep;
}

}  // namespace sbp
