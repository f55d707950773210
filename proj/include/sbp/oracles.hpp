#pragma once

// Brute-force validators for the derived radial reductions and the
// functional derivative. These deliberately share no code with the
// closed-form kernels in kernel.hpp.

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "sbp/energy.hpp"

namespace sbp {

namespace oracle_detail {
// Composite Simpson of f over [lo, hi] with an odd node count.
inline double simpson(const std::function<double(double)>& f, double lo,
                      double hi, int n_nodes) {
  if (n_nodes < 3) throw std::invalid_argument("simpson: n_nodes >= 3");
  if (n_nodes % 2 == 0) ++n_nodes;
  const double h = (hi - lo) / (n_nodes - 1);
  double s = f(lo) + f(hi);
  for (int i = 1; i + 1 < n_nodes; ++i)
    s += f(lo + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Distance between points at radii r, s with angle theta between them.
inline double chord(double r, double s, double theta) {
  const double d2 = r * r + s * s - 2.0 * r * s * std::cos(theta);
  return d2 > 0.0 ? std::sqrt(d2) : 0.0;
}
}  // namespace oracle_detail

/// (1/2) int_0^pi K(d(r,s,theta)) sin(theta) dtheta with the kernel written
/// out inline; validates reduced_kernel_G against the 3D definition.
inline double angular_oracle_G(double r, double s, double a,
                               int n_theta = 20001) {
  auto integrand = [&](double theta) {
    const double st = std::sin(theta);
    const double d = oracle_detail::chord(r, s, theta);
    if (d == 0.0) {
      if (a > 0.0) return st / a;  // K(0+) = 1/a
      if (r == s && r > 0.0) return std::cos(0.5 * theta) / r;
      throw std::domain_error("angular_oracle_G: singular configuration");
    }
    if (a == 0.0) return st / d;
    return st * (-std::expm1(-d / a)) / d;
  };
  return 0.5 * oracle_detail::simpson(integrand, 0.0, std::numbers::pi, n_theta);
}

/// Same quadrature for the Pohozaev kernel e^{-d/a}.
inline double angular_oracle_H(double r, double s, double a,
                               int n_theta = 20001) {
  if (!(a > 0.0)) throw std::invalid_argument("angular_oracle_H: a must be > 0");
  auto integrand = [&](double theta) {
    const double d = oracle_detail::chord(r, s, theta);
    return std::sin(theta) * std::exp(-d / a);
  };
  return 0.5 * oracle_detail::simpson(integrand, 0.0, std::numbers::pi, n_theta);
}

/// 2D quadrature of phi(r) = 2 pi int int rho(s) s^2 K(d) sin(theta) dth ds
/// for a > 0; for a = 0 with the unit Gaussian rho = e^{-s^2} the exact
/// Newtonian potential pi^{3/2} erf(r)/r is used instead.
inline double phi_oracle(double r, double a,
                         const std::function<double(double)>& rho,
                         double s_max, int n_s = 4001, int n_theta = 2001) {
  if (a == 0.0)
    throw std::invalid_argument("phi_oracle: use phi_oracle_coulomb_gaussian for a = 0");
  auto outer = [&](double s) {
    return rho(s) * s * s * 2.0 * angular_oracle_G(r, s, a, n_theta);
  };
  return 2.0 * std::numbers::pi *
         oracle_detail::simpson(outer, 0.0, s_max, n_s);
}

/// Closed-form Coulomb potential of the unit Gaussian density e^{-|y|^2}.
inline double phi_oracle_coulomb_gaussian(double r) {
  constexpr double pi32 = 5.568327996831707845;  // pi^{3/2}
  if (r < 1e-8) {
    // erf(r)/r -> 2/sqrt(pi) - 2r^2/(3 sqrt(pi))
    return pi32 * (2.0 / std::sqrt(std::numbers::pi)) * (1.0 - r * r / 3.0);
  }
  return pi32 * std::erf(r) / r;
}

struct MCEstimate {
  double value = 0.0;
  double sigma = 0.0;
};

/// One isotropic Gaussian component A e^{-|x|^2 / w^2} of a density mixture.
struct GaussianComponent {
  double amplitude = 1.0;
  double width = 1.0;
  double mass() const {
    return amplitude * std::pow(std::numbers::pi, 1.5) * width * width * width;
  }
};

/// Monte-Carlo estimate of iint e^{-|x-y|/a} rho(x) rho(y) dx dy by exact
/// importance sampling from the Gaussian mixture. Deterministic given seed.
inline MCEstimate mc_double_integral(const std::vector<GaussianComponent>& rho,
                                     double a, std::int64_t n_samples,
                                     std::uint64_t seed) {
  if (!(a > 0.0)) throw std::invalid_argument("mc_double_integral: a must be > 0");
  double total_mass = 0.0;
  std::vector<double> cum;
  for (const auto& c : rho) {
    if (c.amplitude < 0.0 || !(c.width > 0.0))
      throw std::invalid_argument("mc_double_integral: invalid component");
    total_mass += c.mass();
    cum.push_back(total_mass);
  }
  if (total_mass == 0.0) return {0.0, 0.0};

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto sample_point = [&](double out[3]) {
    const double pick = uni(rng) * total_mass;
    std::size_t k = 0;
    while (k + 1 < cum.size() && pick > cum[k]) ++k;
    const double sd = rho[k].width / std::sqrt(2.0);  // e^{-|x|^2/w^2}
    out[0] = sd * gauss(rng);
    out[1] = sd * gauss(rng);
    out[2] = sd * gauss(rng);
  };

  double sum = 0.0, sum_sq = 0.0;
  for (std::int64_t i = 0; i < n_samples; ++i) {
    double x[3], y[3];
    sample_point(x);
    sample_point(y);
    const double dx = x[0] - y[0], dy = x[1] - y[1], dz = x[2] - y[2];
    const double d = std::sqrt(dx * dx + dy * dy + dz * dz);
    const double f = std::exp(-d / a);
    sum += f;
    sum_sq += f * f;
  }
  const double n = static_cast<double>(n_samples);
  const double mean = sum / n;
  const double var = std::max(sum_sq / n - mean * mean, 0.0);
  MCEstimate est;
  est.value = total_mass * total_mass * mean;
  est.sigma = total_mass * total_mass * std::sqrt(var / n);
  return est;
}

/// Central-difference check of <J'(u), v> against (J(u+eps v)-J(u-eps v))/2eps.
/// Returns per-eps relative errors (same order as eps_list).
inline std::vector<double> fd_gradient_errors(const SBPParams& params,
                                              const RadialGrid& g,
                                              const RadialField& u,
                                              const RadialField& v,
                                              const std::vector<double>& eps_list) {
  params.validate();
  detail::require_grid(g, u, "fd_gradient_check");
  detail::require_grid(g, v, "fd_gradient_check");
  const double vn = norm(g, v, NormKind::L2);
  if (vn < 1e-12)
    throw std::invalid_argument("fd_gradient_check: direction too small");

  KernelTable table(g, params.kernel());
  RadialField lg = l2_gradient(params, g, u, nullptr, &table);
  double pairing = 0.0;
  for (std::size_t i = 0; i < g.n; ++i)
    pairing += g.weights[i] * lg.values[i] * v.values[i];

  auto J_of = [&](const RadialField& w) {
    FiberComponents c = fiber_components(params, g, w, &table);
    return c.J();
  };
  std::vector<double> errs;
  const double scale = std::max(std::abs(pairing), 1e-30);
  for (double eps : eps_list) {
    RadialField up(g), um(g);
    for (std::size_t i = 0; i < g.n; ++i) {
      up.values[i] = u.values[i] + eps * v.values[i];
      um.values[i] = u.values[i] - eps * v.values[i];
    }
    const double fd = (J_of(up) - J_of(um)) / (2.0 * eps);
    errs.push_back(std::abs(fd - pairing) / scale);
  }
  return errs;
}

/// Max relative error over eps_list (the gate value).
inline double fd_gradient_check(const SBPParams& params, const RadialGrid& g,
                                const RadialField& u, const RadialField& v,
                                const std::vector<double>& eps_list) {
  double worst = 0.0;
  for (double e : fd_gradient_errors(params, g, u, v, eps_list))
    worst = std::max(worst, e);
  return worst;
}

}  // namespace sbp
