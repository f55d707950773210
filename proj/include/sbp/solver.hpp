#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sbp/energy.hpp"

namespace sbp {

struct SolveOptions {
  double tol = 1e-8;       // relative H1(omega) gradient tolerance
  int max_iter = 20000;
  double step0 = 1.0;
  double backtrack = 0.5;  // step shrink factor in (0,1)
  std::uint64_t seed = 0;  // direction sampling
  bool clamp_negative = true;

  void validate() const {
    if (!(tol > 0.0)) throw std::invalid_argument("SolveOptions: tol must be > 0");
    if (max_iter < 1) throw std::invalid_argument("SolveOptions: max_iter must be >= 1");
    if (!(backtrack > 0.0 && backtrack < 1.0))
      throw std::invalid_argument("SolveOptions: backtrack must be in (0,1)");
    if (!(step0 > 0.0)) throw std::invalid_argument("SolveOptions: step0 must be > 0");
  }
};

struct SolveResult {
  RadialField u;
  EnergyReport report;
  std::vector<double> tau_history;
  std::vector<double> grad_history;  // relative H1(omega) gradient norms
  bool converged = false;
  int iterations = 0;
  double c_estimate = 0.0;   // J(u), candidate ground-state level
  double decay_slope = 0.0;  // fitted tail slope of ln u
  bool nehari_guaranteed = true;  // false for p in (2,4)
  bool critical = false;          // p == 6
};

/// g(tau) = J(tau u) along the ray through u.
inline double fibering_g(const SBPParams& params, const RadialGrid& g,
                         const RadialField& u, double tau,
                         const KernelTable* table = nullptr) {
  if (!(tau > 0.0)) throw std::invalid_argument("fibering_g: tau must be > 0");
  FiberComponents c = fiber_components(params, g, u, table);
  if (c.Q() == 0.0) throw std::invalid_argument("fibering_g: u must be nonzero");
  return c.J_at(tau);
}

/// Unique root of h(tau) = Q - B tau^2 - C tau^{p-2}; h is strictly
/// decreasing for B, C > 0, so a doubling bracket plus bisection converges.
inline double tau_star_from(double Q, double B, double C, double p) {
  if (!(Q > 0.0) || !(C > 0.0) || B < 0.0)
    throw std::invalid_argument("tau_star: needs Q > 0, C > 0, B >= 0");
  if (p == 4.0) return std::sqrt(Q / (B + C));
  auto h = [&](double t) {
    return Q - B * t * t - C * std::pow(t, p - 2.0);
  };
  double lo = 0.0, hi = 1.0;
  int guard = 0;
  while (h(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 2000)
      throw std::runtime_error("tau_star: bracket failure (internal error)");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double hm = h(mid);
    if (std::abs(hm) <= 1e-13 * Q) return mid;
    (hm > 0.0 ? lo : hi) = mid;
    if (hi - lo <= 1e-16 * hi) break;
  }
  return 0.5 * (lo + hi);
}

inline double tau_star(const SBPParams& params, const RadialGrid& g,
                       const RadialField& u,
                       const KernelTable* table = nullptr) {
  FiberComponents c = fiber_components(params, g, u, table);
  return tau_star_from(c.Q(), c.B(), c.C(), params.p);
}

/// tau_star(u) * u: the Nehari projection of the ray through u.
inline RadialField project_nehari(const SBPParams& params, const RadialGrid& g,
                                  const RadialField& u,
                                  const KernelTable* table = nullptr) {
  const double tau = tau_star(params, g, u, table);
  RadialField out = u;
  for (double& v : out.values) v *= tau;
  return out;
}

/// Default initial ray: e^{-r^2}, Dirichlet-truncated.
inline RadialField default_init(const RadialGrid& g) {
  RadialField u(g);
  for (std::size_t i = 0; i < g.n; ++i)
    u.values[i] = std::exp(-g.nodes[i] * g.nodes[i]);
  u.values[g.n - 1] = 0.0;
  return u;
}

namespace detail {
inline double fit_tail_slope(const RadialGrid& g, const RadialField& u,
                             double tail_fraction);
}

/// Nehari-projected Sobolev gradient descent:
///   u <- project_nehari(clamp(u - eta * sobolev_gradient(u)))
/// with backtracking on J. Deterministic given (opts, init).
inline SolveResult solve_ground_state(const SBPParams& params,
                                      const RadialGrid& g,
                                      const SolveOptions& opts = {},
                                      const RadialField* init = nullptr) {
  params.validate();
  opts.validate();
  KernelTable table(g, params.kernel());

  SolveResult res;
  res.nehari_guaranteed = params.nehari_guaranteed();
  res.critical = params.critical();

  RadialField u = init ? *init : default_init(g);
  detail::require_grid(g, u, "solve_ground_state");
  u.values[g.n - 1] = 0.0;
  if (opts.clamp_negative)
    for (double& v : u.values) v = std::max(v, 0.0);

  FiberComponents comp = fiber_components(params, g, u, &table);
  if (!(comp.Q() > 0.0) || !(comp.C() > 0.0))
    throw std::invalid_argument("solve_ground_state: trivial initial field");
  {
    const double tau = tau_star_from(comp.Q(), comp.B(), comp.C(), params.p);
    for (double& v : u.values) v *= tau;
    comp.scale_by(tau);
  }
  double J_cur = comp.J();
  double eta = opts.step0;

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    res.iterations = iter;
    // phi of the current iterate, recovered from the components' solve.
    RadialField rho(g);
    for (std::size_t i = 0; i < g.n; ++i)
      rho.values[i] = u.values[i] * u.values[i];
    RadialField phi = table.phi(rho);
    RadialField grad = sobolev_gradient(params, g, u, &phi, &table);
    const double gn2 = h1_form(g, grad, grad, params.omega);
    const double un2 = h1_form(g, u, u, params.omega);
    const double rel = std::sqrt(gn2 / un2);
    res.grad_history.push_back(rel);
    if (rel <= opts.tol) {
      res.converged = true;
      break;
    }

    eta = std::min(eta / opts.backtrack, opts.step0);
    bool accepted = false;
    while (eta > 1e-14) {
      RadialField trial(g);
      bool nonzero = false;
      for (std::size_t i = 0; i < g.n; ++i) {
        double v = u.values[i] - eta * grad.values[i];
        if (opts.clamp_negative && v < 0.0) v = 0.0;
        trial.values[i] = v;
        if (v != 0.0) nonzero = true;
      }
      trial.values[g.n - 1] = 0.0;
      if (nonzero) {
        FiberComponents tc = fiber_components(params, g, trial, &table);
        if (tc.Q() > 0.0 && tc.C() > 0.0) {
          const double tau = tau_star_from(tc.Q(), tc.B(), tc.C(), params.p);
          const double J_trial = tc.J_at(tau);
          // near the minimum the true decrease ~ ||grad||^2 drops below
          // roundoff in J; a tiny relative slack keeps the contraction going
          if (J_trial <= J_cur + 1e-13 * std::abs(J_cur)) {
            for (std::size_t i = 0; i < g.n; ++i)
              u.values[i] = tau * trial.values[i];
            tc.scale_by(tau);
            comp = tc;
            J_cur = J_trial;
            res.tau_history.push_back(tau);
            accepted = true;
            break;
          }
        }
      }
      eta *= opts.backtrack;
    }
    if (!accepted) break;  // line search stagnated; leave converged flag as is
  }

  res.u = u;
  res.report = energy_report(params, g, u, &table);
  res.c_estimate = res.report.J;
  res.decay_slope = detail::fit_tail_slope(g, u, 0.25);
  return res;
}

/// Seeded smooth direction: either a Gaussian of random width or a smooth
/// exponential profile e^{-beta(sqrt(1+r^2)-1)} (matching the exponential
/// tails of ground states), plus a random off-center bump; nonnegative.
inline RadialField sample_direction(const RadialGrid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const bool exponential = uni(rng) < 0.5;
  const double sigma = std::exp(std::log(0.4) + uni(rng) * (std::log(2.5) - std::log(0.4)));
  const double beta = std::exp(std::log(0.5) + uni(rng) * (std::log(2.0) - std::log(0.5)));
  const double amp = 0.5 * uni(rng);
  const double center = 5.0 * uni(rng);
  const double width = std::exp(std::log(0.5) + uni(rng) * (std::log(1.5) - std::log(0.5)));
  RadialField v(g);
  for (std::size_t i = 0; i < g.n; ++i) {
    const double r = g.nodes[i];
    const double b = (r - center) / width;
    double core;
    if (exponential) {
      core = std::exp(-beta * (std::sqrt(1.0 + r * r) - 1.0));
    } else {
      const double z = r / sigma;
      core = std::exp(-z * z);
    }
    v.values[i] = core + amp * std::exp(-b * b);
  }
  v.values[g.n - 1] = 0.0;
  return v;
}

/// min over seeded directions v of J(project_nehari(v)); an upper bound
/// on the ground-state level up to discretization.
inline double minimax_estimate(const SBPParams& params, const RadialGrid& g,
                               int n_dirs, const SolveOptions& opts = {}) {
  params.validate();
  if (n_dirs < 1) throw std::invalid_argument("minimax_estimate: n_dirs >= 1");
  KernelTable table(g, params.kernel());
  std::mt19937_64 rng(opts.seed);
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_dirs; ++k) {
    RadialField v = sample_direction(g, rng);
    FiberComponents c = fiber_components(params, g, v, &table);
    if (!(c.Q() > 0.0) || !(c.C() > 0.0)) continue;
    const double tau = tau_star_from(c.Q(), c.B(), c.C(), params.p);
    best = std::min(best, c.J_at(tau));
  }
  return best;
}

namespace detail {
// Least-squares slope of ln u(r) vs r over the outer tail_fraction of radii,
// restricted to nodes with u above the underflow threshold.
inline double fit_tail_slope(const RadialGrid& g, const RadialField& u,
                             double tail_fraction) {
  const double r_lo = g.r_max * (1.0 - tail_fraction);
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < g.n; ++i) {
    if (g.nodes[i] >= r_lo && u.values[i] > 1e-250)
      pts.emplace_back(g.nodes[i], std::log(u.values[i]));
  }
  // Auto-shrink toward smaller radii if the tail underflowed.
  double lo = r_lo;
  while (pts.size() < 5 && lo > 0.0) {
    lo *= 0.8;
    pts.clear();
    for (std::size_t i = 0; i < g.n; ++i)
      if (g.nodes[i] >= lo && u.values[i] > 1e-250)
        pts.emplace_back(g.nodes[i], std::log(u.values[i]));
    if (lo < g.nodes[1]) break;
  }
  if (pts.size() < 2)
    throw std::runtime_error("fit_tail_slope: no usable tail window");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto& [x, y] : pts) {
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  const double m = static_cast<double>(pts.size());
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}
}  // namespace detail

}  // namespace sbp
