#pragma once

#include <cmath>
#include <stdexcept>

#include "sbp/kernel.hpp"
#include "sbp/radial_grid.hpp"

namespace sbp {

/// Model parameters of -Delta u + omega u - mu phi_u u = |u|^{p-2} u.
struct SBPParams {
  double omega = 1.0;  // frequency, > 0
  double mu = 1.0;     // coupling, > 0
  double a = 1.0;      // screening length, >= 0 (0 = Coulomb limit)
  double p = 4.0;      // power exponent, in (2, 6]

  void validate() const {
    if (!(omega > 0.0) || !std::isfinite(omega))
      throw std::invalid_argument("SBPParams: omega must be > 0");
    if (!(mu > 0.0) || !std::isfinite(mu))
      throw std::invalid_argument("SBPParams: mu must be > 0");
    if (!(a >= 0.0) || !std::isfinite(a))
      throw std::invalid_argument("SBPParams: a must be >= 0");
    if (!(p > 2.0 && p <= 6.0))
      throw std::invalid_argument("SBPParams: p must be in (2, 6]");
  }
  // Ground-state characterization via the Nehari manifold is only proved
  // for p in [4, 6]; outside that range results carry a warning flag.
  bool nehari_guaranteed() const { return p >= 4.0; }
  bool critical() const { return p == 6.0; }
  KernelSpec kernel() const { return KernelSpec{a}; }
};

/// J and its pieces, the Nehari value <J'(u),u>, the Pohozaev value P(u),
/// and I(u) = <J'(u),u> - P(u).
struct EnergyReport {
  double kinetic = 0.0;   // (1/2) ||grad u||^2
  double mass = 0.0;      // (omega/2) ||u||^2
  double nonlocal = 0.0;  // (mu/4) int phi_u u^2
  double power = 0.0;     // (1/p) ||u||_p^p
  double J = 0.0;
  double nehari = 0.0;
  double pohozaev = 0.0;
  double i_val = 0.0;
};

/// Homogeneous building blocks of J along the ray tau -> tau*u:
/// Q tau^2/2 - B tau^4/4 - C tau^p/p.
struct FiberComponents {
  double grad_sq = 0.0;   // ||grad u||^2 (Dirichlet form)
  double mass_sq = 0.0;   // ||u||^2
  double nl_int = 0.0;    // int phi_u u^2
  double lp_pow = 0.0;    // ||u||_p^p
  double omega = 0.0, mu = 0.0, p = 0.0;

  double Q() const { return grad_sq + omega * mass_sq; }
  double B() const { return mu * nl_int; }
  double C() const { return lp_pow; }
  double J_at(double tau) const {
    return 0.5 * tau * tau * Q() - 0.25 * std::pow(tau, 4.0) * B() -
           std::pow(tau, p) / p * C();
  }
  double J() const { return 0.5 * Q() - 0.25 * B() - C() / p; }
  double nehari() const { return Q() - B() - C(); }
  // h(tau) = g'(tau)/tau = Q - B tau^2 - C tau^{p-2}
  double h_at(double tau) const {
    return Q() - B() * tau * tau - C() * std::pow(tau, p - 2.0);
  }
  void scale_by(double tau) {
    grad_sq *= tau * tau;
    mass_sq *= tau * tau;
    nl_int *= tau * tau * tau * tau;
    lp_pow *= std::pow(tau, p);
  }
};

/// One phi solve plus all quadratic/quartic/power integrals of u.
inline FiberComponents fiber_components(const SBPParams& params,
                                        const RadialGrid& g,
                                        const RadialField& u,
                                        const KernelTable* table = nullptr) {
  params.validate();
  detail::require_grid(g, u, "fiber_components");
  FiberComponents c;
  c.omega = params.omega;
  c.mu = params.mu;
  c.p = params.p;
  c.grad_sq = dirichlet_form(g, u, u);
  RadialField rho(g);
  for (std::size_t i = 0; i < g.n; ++i)
    rho.values[i] = u.values[i] * u.values[i];
  c.mass_sq = integrate(g, rho);
  RadialField phi = table ? table->phi(rho) : solve_phi(g, rho, params.kernel());
  double nl = 0.0, lp = 0.0;
  for (std::size_t i = 0; i < g.n; ++i) {
    nl += g.weights[i] * phi.values[i] * rho.values[i];
    lp += g.weights[i] * std::pow(std::abs(u.values[i]), params.p);
  }
  c.nl_int = nl;
  c.lp_pow = lp;
  return c;
}

/// Full report including the Pohozaev value. At a = 0 the exponential
/// double-integral term is absent from the limit equation and is dropped.
inline EnergyReport energy_report(const SBPParams& params, const RadialGrid& g,
                                  const RadialField& u,
                                  const KernelTable* table = nullptr) {
  FiberComponents c = fiber_components(params, g, u, table);
  EnergyReport rep;
  rep.kinetic = 0.5 * c.grad_sq;
  rep.mass = 0.5 * params.omega * c.mass_sq;
  rep.nonlocal = 0.25 * params.mu * c.nl_int;
  rep.power = c.lp_pow / params.p;
  rep.J = rep.kinetic + rep.mass - rep.nonlocal - rep.power;
  rep.nehari = c.nehari();
  double e_term = 0.0;
  if (params.a > 0.0) {
    RadialField rho(g);
    for (std::size_t i = 0; i < g.n; ++i)
      rho.values[i] = u.values[i] * u.values[i];
    const double E = table && table->spec().a == params.a
                         ? table->double_E(rho)
                         : double_integral_E(g, rho, params.kernel());
    e_term = params.mu / (4.0 * params.a) * E;
  }
  rep.pohozaev = 0.5 * c.grad_sq + 1.5 * params.omega * c.mass_sq -
                 1.25 * params.mu * c.nl_int - 3.0 / params.p * c.lp_pow -
                 e_term;
  rep.i_val = rep.nehari - rep.pohozaev;
  return rep;
}

/// Strong-form residual -Delta u + omega u - mu phi_u u - |u|^{p-2} u.
/// Precomputed phi may be passed to avoid the O(n^2) solve.
inline RadialField l2_gradient(const SBPParams& params, const RadialGrid& g,
                               const RadialField& u,
                               const RadialField* phi_in = nullptr,
                               const KernelTable* table = nullptr) {
  params.validate();
  detail::require_grid(g, u, "l2_gradient");
  RadialField phi;
  if (phi_in) {
    detail::require_grid(g, *phi_in, "l2_gradient");
  } else {
    RadialField rho(g);
    for (std::size_t i = 0; i < g.n; ++i)
      rho.values[i] = u.values[i] * u.values[i];
    phi = table ? table->phi(rho) : solve_phi(g, rho, params.kernel());
    phi_in = &phi;
  }
  RadialField lap = radial_laplacian(g, u);
  RadialField out(g);
  for (std::size_t i = 0; i < g.n; ++i) {
    const double ui = u.values[i];
    out.values[i] = -lap.values[i] + params.omega * ui -
                    params.mu * phi_in->values[i] * ui -
                    std::pow(std::abs(ui), params.p - 2.0) * ui;
  }
  return out;
}

/// Riesz representative of J'(u) in the H1(omega) inner product:
/// the descent direction.
inline RadialField sobolev_gradient(const SBPParams& params,
                                    const RadialGrid& g, const RadialField& u,
                                    const RadialField* phi_in = nullptr,
                                    const KernelTable* table = nullptr) {
  return sobolev_solve(g, params.omega,
                       l2_gradient(params, g, u, phi_in, table));
}

}  // namespace sbp
