#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "sbp/radial_grid.hpp"

namespace sbp {

/// Screening length of the Bopp-Podolsky kernel; a = 0 is the Coulomb limit.
struct KernelSpec {
  double a = 0.0;
  bool coulomb() const { return a == 0.0; }
  void validate() const {
    if (!(a >= 0.0) || !std::isfinite(a))
      throw std::invalid_argument("KernelSpec: a must be finite and >= 0");
  }
};

/// K(r) = (1 - e^{-r/a})/r, continuously extended to 1/a at r = 0;
/// 1/r in the Coulomb limit a = 0.
inline double kernel_K(double r, const KernelSpec& spec) {
  spec.validate();
  if (r < 0.0) throw std::invalid_argument("kernel_K: r must be >= 0");
  if (spec.coulomb()) {
    if (r == 0.0) throw std::domain_error("kernel_K: singular at r = 0, a = 0");
    return 1.0 / r;
  }
  const double x = r / spec.a;
  if (x < 1e-8) return (1.0 - 0.5 * x + x * x / 6.0) / spec.a;
  return -std::expm1(-x) / r;
}

namespace detail {
// e^x - 1 - x without cancellation for small x.
inline double expm1_minus_x(double x) {
  if (std::abs(x) < 1e-3)
    return 0.5 * x * x *
           (1.0 + x / 3.0 + x * x / 12.0 + x * x * x / 60.0 +
            x * x * x * x / 360.0);
  return std::expm1(x) - x;
}
}  // namespace detail

/// Spherical average of K(|x - y|) over directions, |x| = r, |y| = s:
/// G_a(r,s) = 1/max(r,s) - (a/(2rs)) (e^{-|r-s|/a} - e^{-(r+s)/a}),
/// evaluated in a cancellation-free arrangement.
inline double reduced_kernel_G(double r, double s, const KernelSpec& spec) {
  spec.validate();
  if (r < 0.0 || s < 0.0)
    throw std::invalid_argument("reduced_kernel_G: radii must be >= 0");
  const double M = std::max(r, s);
  if (spec.coulomb()) {
    if (M == 0.0)
      throw std::domain_error("reduced_kernel_G: singular at r = s = 0, a = 0");
    return 1.0 / M;
  }
  if (r == 0.0 || s == 0.0) return kernel_K(M, spec);
  const double a = spec.a;
  const double m = std::min(r, s);
  const double D = M - m;
  const double S = r + s;
  if (S / a < 1e-6) {
    // K is nearly constant over [D, S]: integrate its Taylor series in d.
    const double tm = 2.0 * m;  // S - D
    const double p2 = tm * (S + D);
    const double p3 = tm * (S * S + S * D + D * D);
    const double p4 = tm * (S + D) * (S * S + D * D);
    const double inv = 1.0 / (2.0 * r * s * a);
    return inv * (0.5 * p2 - p3 / (6.0 * a) + p4 / (24.0 * a * a));
  }
  const double x = 2.0 * m / a;
  const double bracket = 2.0 * m + a * std::exp(-D / a) * std::expm1(-x);
  return bracket / (2.0 * r * s);
}

/// Spherical average of e^{-|x-y|/a}:
/// H_a(r,s) = [a e^{-|r-s|/a}(|r-s|+a) - a e^{-(r+s)/a}(r+s+a)] / (2rs).
inline double reduced_kernel_H(double r, double s, const KernelSpec& spec) {
  spec.validate();
  if (spec.coulomb())
    throw std::invalid_argument("reduced_kernel_H: undefined for a = 0");
  if (r < 0.0 || s < 0.0)
    throw std::invalid_argument("reduced_kernel_H: radii must be >= 0");
  const double a = spec.a;
  if (r == 0.0 || s == 0.0) return std::exp(-(r + s) / a);
  const double m = std::min(r, s);
  const double D = std::max(r, s) - m;
  const double S = r + s;
  const double x = 2.0 * m / a;
  if (x > 30.0) {
    return (a * std::exp(-D / a) * (D + a) - a * std::exp(-S / a) * (S + a)) /
           (2.0 * r * s);
  }
  // (D+a) e^{x} - (S+a) = (D+a)(e^x - 1 - x) + D x, both terms >= 0.
  const double bracket = (D + a) * detail::expm1_minus_x(x) + D * x;
  return a * std::exp(-S / a) * bracket / (2.0 * r * s);
}

/// phi(r_i) = sum_j G_a(r_i, s_j) rho_j w_j, the potential K * rho for
/// nonnegative radial density rho. Matrix-free O(n^2).
inline RadialField solve_phi(const RadialGrid& g, const RadialField& rho,
                             const KernelSpec& spec) {
  detail::require_grid(g, rho, "solve_phi");
  spec.validate();
  for (double v : rho.values)
    if (v < 0.0) throw std::invalid_argument("solve_phi: rho must be >= 0");
  RadialField phi(g);
  for (std::size_t i = 0; i < g.n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < g.n; ++j) {
      const double w = g.weights[j] * rho.values[j];
      if (w != 0.0) s += reduced_kernel_G(g.nodes[i], g.nodes[j], spec) * w;
    }
    phi.values[i] = s;
  }
  return phi;
}

/// The Pohozaev double integral  iint e^{-|x-y|/a} rho(x) rho(y) dx dy.
inline double double_integral_E(const RadialGrid& g, const RadialField& rho,
                                const KernelSpec& spec) {
  detail::require_grid(g, rho, "double_integral_E");
  if (spec.coulomb())
    throw std::invalid_argument("double_integral_E: undefined for a = 0");
  for (double v : rho.values)
    if (v < 0.0)
      throw std::invalid_argument("double_integral_E: rho must be >= 0");
  double total = 0.0;
  for (std::size_t i = 0; i < g.n; ++i) {
    const double wi = g.weights[i] * rho.values[i];
    if (wi == 0.0) continue;
    double row = 0.0;
    for (std::size_t j = 0; j < g.n; ++j) {
      const double wj = g.weights[j] * rho.values[j];
      if (wj != 0.0) row += reduced_kernel_H(g.nodes[i], g.nodes[j], spec) * wj;
    }
    total += wi * row;
  }
  return total;
}

/// Precomputed kernel matrices for one (grid, a) pair. Immutable after
/// construction; shared read-only across solves.
class KernelTable {
 public:
  KernelTable(const RadialGrid& g, const KernelSpec& spec, bool with_H = false)
      : grid_(&g), spec_(spec) {
    spec.validate();
    const std::size_t n = g.n;
    G_.resize(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        // the r = s = 0 Coulomb entry is singular but always carries zero
        // quadrature weight; store 0 so it never contributes
        if (spec.coulomb() && g.nodes[i] == 0.0 && g.nodes[j] == 0.0) {
          G_[i * n + j] = 0.0;
          continue;
        }
        G_[i * n + j] = reduced_kernel_G(g.nodes[i], g.nodes[j], spec);
      }
    if (with_H && !spec.coulomb()) build_H();
  }

  const RadialGrid& grid() const { return *grid_; }
  const KernelSpec& spec() const { return spec_; }

  /// Same contraction as solve_phi, using the cached matrix.
  RadialField phi(const RadialField& rho) const {
    detail::require_grid(*grid_, rho, "KernelTable::phi");
    const std::size_t n = grid_->n;
    RadialField out(*grid_);
    std::vector<double> wr(n);
    for (std::size_t j = 0; j < n; ++j)
      wr[j] = grid_->weights[j] * rho.values[j];
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      const double* row = &G_[i * n];
      for (std::size_t j = 0; j < n; ++j) s += row[j] * wr[j];
      out.values[i] = s;
    }
    return out;
  }

  double double_E(const RadialField& rho) const {
    detail::require_grid(*grid_, rho, "KernelTable::double_E");
    if (spec_.coulomb())
      throw std::invalid_argument("KernelTable::double_E: undefined for a = 0");
    if (H_.empty()) const_cast<KernelTable*>(this)->build_H();
    const std::size_t n = grid_->n;
    std::vector<double> wr(n);
    for (std::size_t j = 0; j < n; ++j)
      wr[j] = grid_->weights[j] * rho.values[j];
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (wr[i] == 0.0) continue;
      double row = 0.0;
      const double* Hrow = &H_[i * n];
      for (std::size_t j = 0; j < n; ++j) row += Hrow[j] * wr[j];
      total += wr[i] * row;
    }
    return total;
  }

 private:
  void build_H() {
    const std::size_t n = grid_->n;
    H_.resize(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        H_[i * n + j] = reduced_kernel_H(grid_->nodes[i], grid_->nodes[j], spec_);
  }

  const RadialGrid* grid_;
  KernelSpec spec_;
  std::vector<double> G_;
  std::vector<double> H_;
};

}  // namespace sbp
