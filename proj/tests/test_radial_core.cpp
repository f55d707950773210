#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "sbp/radial_grid.hpp"

using namespace sbp;

namespace {
constexpr double kPi = std::numbers::pi;

RadialField sample(const RadialGrid& g, double (*f)(double)) {
  RadialField out(g);
  for (std::size_t i = 0; i < g.n; ++i) out.values[i] = f(g.nodes[i]);
  return out;
}
}  // namespace

TEST_CASE("make_grid basic structure") {
  RadialGrid g = make_grid(16, 1.0, 1.0);
  CHECK(g.nodes.front() == 0.0);
  CHECK(g.nodes.back() == 1.0);
  for (std::size_t i = 0; i + 1 < g.n; ++i) CHECK(g.nodes[i] < g.nodes[i + 1]);
}

TEST_CASE("make_grid rejects invalid arguments") {
  CHECK_THROWS_AS(make_grid(8, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(64, -1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(64, 1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(64, 1.0, 5.0), std::invalid_argument);
}

TEST_CASE("weights: nonnegative, constants exact") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> grading(1.0, 4.0);
  std::uniform_int_distribution<int> npts(16, 3000);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = static_cast<std::size_t>(npts(rng));
    const double rmax = std::pow(10.0, -1 + 3.0 * (trial % 5) / 4.0);
    RadialGrid g = make_grid(n, rmax, grading(rng));
    double total = 0.0;
    for (double w : g.weights) {
      CHECK(w >= 0.0);
      total += w;
    }
    const double exact = 4.0 / 3.0 * kPi * rmax * rmax * rmax;
    CHECK(std::abs(total - exact) <= 1e-10 * exact);
  }
}

TEST_CASE("integrate: constant over ball") {
  RadialGrid g = make_grid(4096, 10.0, 1.0);
  RadialField one(g, 1.0);
  const double exact = 4.0 / 3.0 * kPi * 1000.0;
  CHECK(std::abs(integrate(g, one) - exact) <= 1e-10 * exact);
}

TEST_CASE("integrate: zero field and positivity of bumps") {
  RadialGrid g = make_grid(128, 5.0);
  RadialField zero(g);
  CHECK(integrate(g, zero) == 0.0);
  RadialField bump = sample(g, +[](double r) {
    return std::exp(-(r - 2.0) * (r - 2.0) * 10.0);
  });
  CHECK(integrate(g, bump) > 0.0);
}

TEST_CASE("integrate: Gaussian matches pi^{3/2}") {
  const double exact = std::pow(kPi, 1.5);
  for (double grading : {1.0, 2.0}) {
    RadialGrid g = make_grid(4096, 12.0, grading);
    RadialField f = sample(g, +[](double r) { return std::exp(-r * r); });
    CHECK(std::abs(integrate(g, f) - exact) <= 1e-8 * exact);
  }
}

TEST_CASE("integrate: grid mismatch throws") {
  RadialGrid g1 = make_grid(64, 5.0);
  RadialGrid g2 = make_grid(64, 5.0);
  RadialField f(g1, 1.0);
  CHECK_THROWS_AS(integrate(g2, f), std::invalid_argument);
}

TEST_CASE("derivative: constants and quadratics") {
  RadialGrid g = make_grid(200, 7.0, 2.0);
  RadialField c(g, 3.5);
  RadialField dc = derivative(g, c);
  for (double v : dc.values) CHECK(std::abs(v) < 1e-10);

  RadialField q = sample(g, +[](double r) { return r * r; });
  RadialField dq = derivative(g, q);
  for (std::size_t i = 0; i < g.n; ++i)
    CHECK(std::abs(dq.values[i] - 2.0 * g.nodes[i]) <= 1e-10 * (1.0 + g.nodes[i]));
}

TEST_CASE("derivative: second-order refinement on e^{-r}") {
  auto max_err = [](std::size_t n) {
    RadialGrid g = make_grid(n, 8.0, 2.0);
    RadialField f(g);
    for (std::size_t i = 0; i < g.n; ++i)
      f.values[i] = std::exp(-g.nodes[i]);
    RadialField d = derivative(g, f);
    double e = 0.0;
    for (std::size_t i = 1; i + 1 < g.n; ++i)
      e = std::max(e, std::abs(d.values[i] + std::exp(-g.nodes[i])));
    return e;
  };
  const double e1 = max_err(256);
  const double e2 = max_err(512);
  const double order = std::log2(e1 / e2);
  CHECK(order >= 1.9);
}

TEST_CASE("radial_laplacian: constants and quadratics on uniform grid") {
  RadialGrid g = make_grid(128, 6.0, 1.0);
  RadialField c(g, 2.0);
  RadialField lc = radial_laplacian(g, c);
  for (std::size_t i = 0; i + 1 < g.n; ++i) CHECK(std::abs(lc.values[i]) < 1e-10);

  RadialField q = sample(g, +[](double r) { return r * r; });
  RadialField lq = radial_laplacian(g, q);
  for (std::size_t i = 0; i + 1 < g.n; ++i)
    CHECK(lq.values[i] == doctest::Approx(6.0).epsilon(1e-10));
}

TEST_CASE("radial_laplacian: refinement order on Gaussian") {
  // On graded grids the flux stencil is only weakly consistent in a
  // shrinking neighborhood of the origin, so the pointwise order is
  // measured away from r = 0 there.
  auto max_err = [](std::size_t n, double grading, double r_lo) {
    RadialGrid g = make_grid(n, 10.0, grading);
    RadialField f(g);
    for (std::size_t i = 0; i < g.n; ++i)
      f.values[i] = std::exp(-g.nodes[i] * g.nodes[i]);
    RadialField lap = radial_laplacian(g, f);
    double e = 0.0;
    for (std::size_t i = 0; i + 1 < g.n; ++i) {
      const double r = g.nodes[i];
      if (r < r_lo) continue;
      const double exact = (4.0 * r * r - 6.0) * std::exp(-r * r);
      e = std::max(e, std::abs(lap.values[i] - exact));
    }
    return e;
  };
  {
    const double order = std::log2(max_err(512, 1.0, 0.0) / max_err(1024, 1.0, 0.0));
    CHECK(order >= 1.9);
  }
  {
    const double order = std::log2(max_err(512, 2.0, 0.5) / max_err(1024, 2.0, 0.5));
    CHECK(order >= 1.9);
  }
}

TEST_CASE("operator symmetry for Dirichlet fields") {
  RadialGrid g = make_grid(300, 9.0, 2.0);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 5; ++trial) {
    RadialField f(g), h(g);
    for (std::size_t i = 1; i + 1 < g.n; ++i) {
      f.values[i] = gauss(rng);
      h.values[i] = gauss(rng);
    }
    RadialField lf = radial_laplacian(g, f);
    RadialField lh = radial_laplacian(g, h);
    double a = 0.0, b = 0.0;
    for (std::size_t i = 0; i < g.n; ++i) {
      a += g.weights[i] * (-lf.values[i]) * h.values[i];
      b += g.weights[i] * f.values[i] * (-lh.values[i]);
    }
    CHECK(std::abs(a - b) <= 1e-10 * std::max(std::abs(a), std::abs(b)));
    // and both equal the Dirichlet form
    const double form = dirichlet_form(g, f, h);
    CHECK(a == doctest::Approx(form).epsilon(1e-10));
  }
}

TEST_CASE("norm kinds") {
  RadialGrid g = make_grid(2048, 12.0, 1.0);
  RadialField zero(g);
  CHECK(norm(g, zero, NormKind::L2) == 0.0);
  CHECK(norm(g, zero, NormKind::Lp, 4.0) == 0.0);
  CHECK(norm(g, zero, NormKind::H1w, 1.0) == 0.0);
  CHECK(norm(g, zero, NormKind::Dgrad) == 0.0);

  RadialField gsn = sample(g, +[](double r) { return std::exp(-r * r); });
  // ||f||_2^2 = int e^{-2r^2} = (pi/2)^{3/2}
  const double l2 = norm(g, gsn, NormKind::L2);
  CHECK(std::abs(l2 * l2 - std::pow(kPi / 2.0, 1.5)) <=
        1e-8 * std::pow(kPi / 2.0, 1.5));
  // H1(0) would equal Dgrad; use tiny omega equivalence via direct identity
  const double dg = norm(g, gsn, NormKind::Dgrad);
  const double h1 = norm(g, gsn, NormKind::H1w, 0.0);
  CHECK(h1 == doctest::Approx(dg));
  CHECK_THROWS_AS(norm(g, gsn, NormKind::Lp, 1.5), std::invalid_argument);
}

TEST_CASE("sobolev_solve: zero rhs and inverse consistency") {
  RadialGrid g = make_grid(512, 10.0, 2.0);
  RadialField zero(g);
  RadialField u0 = sobolev_solve(g, 1.0, zero);
  for (double v : u0.values) CHECK(v == 0.0);

  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss;
  RadialField rhs(g);
  for (std::size_t i = 0; i < g.n; ++i) rhs.values[i] = gauss(rng);
  RadialField u = sobolev_solve(g, 2.0, rhs);
  CHECK(u.values[g.n - 1] == 0.0);
  RadialField back = apply_helmholtz(g, 2.0, u);
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 0; i + 1 < g.n; ++i) {
    worst = std::max(worst, std::abs(back.values[i] - rhs.values[i]));
    scale = std::max(scale, std::abs(rhs.values[i]));
  }
  // roundoff is amplified by the ~1/h_min^2 diagonal of the graded operator
  CHECK(worst <= 1e-8 * scale);
}

TEST_CASE("sobolev_solve: manufactured solution") {
  // g* = e^{-r^2} - e^{-rmax^2} approximately satisfies the BCs; feed the
  // discrete operator output back and recover g* exactly (inverse pair),
  // then check against the continuum operator to discretization order.
  auto err = [](std::size_t n) {
    RadialGrid g = make_grid(n, 8.0, 1.0);
    RadialField gstar(g);
    const double off = std::exp(-g.r_max * g.r_max);
    for (std::size_t i = 0; i < g.n; ++i)
      gstar.values[i] = std::exp(-g.nodes[i] * g.nodes[i]) - off;
    // continuum rhs of (-Delta + 1) gstar
    RadialField rhs(g);
    for (std::size_t i = 0; i < g.n; ++i) {
      const double r = g.nodes[i];
      const double e = std::exp(-r * r);
      rhs.values[i] = -(4.0 * r * r - 6.0) * e + gstar.values[i];
    }
    RadialField u = sobolev_solve(g, 1.0, rhs);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.n; ++i)
      worst = std::max(worst, std::abs(u.values[i] - gstar.values[i]));
    return worst;
  };
  const double e1 = err(256), e2 = err(512);
  CHECK(e1 / e2 >= 3.0);  // ~second order
  CHECK(e2 < 2e-4);
}
