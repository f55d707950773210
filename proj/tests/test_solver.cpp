#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "sbp/solver.hpp"

using namespace sbp;

namespace {
RadialField gaussian_field(const RadialGrid& g, double sigma, double amp = 1.0) {
  RadialField u(g);
  for (std::size_t i = 0; i < g.n; ++i) {
    const double z = g.nodes[i] / sigma;
    u.values[i] = amp * std::exp(-z * z);
  }
  u.values[g.n - 1] = 0.0;
  return u;
}
}  // namespace

TEST_CASE("SolveOptions validation") {
  SolveOptions o;
  CHECK_NOTHROW(o.validate());
  auto bad = [](double tol, int it, double s0, double bt) {
    SolveOptions q;
    q.tol = tol; q.max_iter = it; q.step0 = s0; q.backtrack = bt;
    q.validate();
  };
  CHECK_THROWS_AS(bad(0.0, 10, 1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(bad(1e-8, 0, 1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(bad(1e-8, 10, 0.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(bad(1e-8, 10, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("fibering_g: definition and endpoint behavior") {
  RadialGrid g = make_grid(256, 12.0, 2.0);
  SBPParams params{1.0, 1.0, 1.0, 4.0};
  RadialField u = gaussian_field(g, 1.0);
  FiberComponents c = fiber_components(params, g, u);
  CHECK(fibering_g(params, g, u, 1.0) == doctest::Approx(c.J()).epsilon(1e-14));
  CHECK(std::abs(fibering_g(params, g, u, 1e-6)) <= 1e-11 * std::abs(c.Q()));
  CHECK(fibering_g(params, g, u, 50.0) < 0.0);
  CHECK_THROWS_AS(fibering_g(params, g, u, 0.0), std::invalid_argument);
  RadialField zero(g);
  CHECK_THROWS_AS(fibering_g(params, g, zero, 1.0), std::invalid_argument);
}

TEST_CASE("tau_star_from: closed forms and root accuracy") {
  CHECK(tau_star_from(2.0, 0.0, 8.0, 4.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK_THROWS_AS(tau_star_from(0.0, 1.0, 1.0, 4.0), std::invalid_argument);
  CHECK_THROWS_AS(tau_star_from(1.0, 1.0, 0.0, 4.0), std::invalid_argument);
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> uni(0.1, 5.0);
  for (double p : {3.0, 4.5, 5.0, 6.0}) {
    for (int k = 0; k < 50; ++k) {
      const double Q = uni(rng), B = uni(rng), C = uni(rng);
      const double t = tau_star_from(Q, B, C, p);
      const double h = Q - B * t * t - C * std::pow(t, p - 2.0);
      CHECK(std::abs(h) <= 1e-12 * Q);
    }
  }
}

TEST_CASE("tau_star / project_nehari: manifold membership and idempotence") {
  RadialGrid g = make_grid(256, 12.0, 2.0);
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> uni(0.5, 1.8);
  for (double p : {4.0, 5.0}) {
    SBPParams params{1.0, 1.0, 1.0, p};
    RadialField u = gaussian_field(g, uni(rng), uni(rng));
    RadialField proj = project_nehari(params, g, u);
    FiberComponents c = fiber_components(params, g, proj);
    CHECK(std::abs(c.nehari()) <= 1e-10 * c.Q());
    CHECK(c.J() > 0.0);  // positive level on the manifold
    // idempotence
    const double tau2 = tau_star(params, g, proj);
    CHECK(std::abs(tau2 - 1.0) <= 1e-10);
    // ray invariance
    RadialField scaled = u;
    for (double& v : scaled.values) v *= 7.3;
    RadialField proj2 = project_nehari(params, g, scaled);
    for (std::size_t i = 0; i < g.n; ++i)
      CHECK(proj2.values[i] == doctest::Approx(proj.values[i]).epsilon(1e-12));
  }
}

TEST_CASE("fibering maximum at tau_star") {
  RadialGrid g = make_grid(256, 12.0, 2.0);
  SBPParams params{1.0, 1.0, 1.0, 4.0};
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> uni(0.5, 1.5);
  for (int trial = 0; trial < 5; ++trial) {
    RadialField u = gaussian_field(g, uni(rng), uni(rng));
    FiberComponents c = fiber_components(params, g, u);
    const double ts = tau_star_from(c.Q(), c.B(), c.C(), params.p);
    const double gmax = c.J_at(ts);
    std::uniform_real_distribution<double> taus(1e-6, 4.0 * ts);
    for (int k = 0; k < 100; ++k) CHECK(c.J_at(taus(rng)) <= gmax * (1.0 + 1e-12));
  }
}

TEST_CASE("solve_ground_state: benchmark parameters on a coarse grid") {
  RadialGrid g = make_grid(512, 30.0, 2.0);
  SBPParams params{1.0, 1.0, 1.0, 4.0};
  SolveOptions opts;
  SolveResult res = solve_ground_state(params, g, opts);
  REQUIRE(res.converged);
  CHECK(res.nehari_guaranteed);
  CHECK_FALSE(res.critical);

  FiberComponents c = fiber_components(params, g, res.u);
  CHECK(std::abs(c.nehari()) <= 1e-8 * c.Q());
  CHECK(res.grad_history.back() <= opts.tol);
  CHECK(res.c_estimate == res.report.J);
  CHECK(res.c_estimate > 0.0);

  // positivity and radial monotonicity on the interior
  double umax = 0.0;
  for (double v : res.u.values) umax = std::max(umax, v);
  for (std::size_t i = 0; i + 1 < g.n; ++i) {
    CHECK(res.u.values[i] > 0.0);
    CHECK(res.u.values[i + 1] <= res.u.values[i] + 1e-12 * umax);
  }
  CHECK(res.decay_slope <= -0.45);

  // scale invariance of the limit: a 10x-scaled init lands on the same level
  RadialField init = default_init(g);
  for (double& v : init.values) v *= 10.0;
  SolveResult res2 = solve_ground_state(params, g, opts, &init);
  REQUIRE(res2.converged);
  CHECK(res2.report.J == doctest::Approx(res.report.J).epsilon(1e-6));
}

TEST_CASE("solve_ground_state: monotone descent of J along accepted steps") {
  RadialGrid g = make_grid(256, 25.0, 2.0);
  SBPParams params{1.0, 1.0, 0.5, 4.0};
  SolveOptions opts;
  opts.tol = 1e-6;
  SolveResult res = solve_ground_state(params, g, opts);
  REQUIRE(res.converged);
  // gradient history ends below tol and the final energy is the lowest seen
  CHECK(res.grad_history.back() <= opts.tol);
  FiberComponents c = fiber_components(params, g, res.u);
  RadialField init = default_init(g);
  RadialField proj = project_nehari(params, g, init);
  FiberComponents c0 = fiber_components(params, g, proj);
  CHECK(c.J() <= c0.J());
}

TEST_CASE("solve_ground_state: trivial init rejected, coulomb limit works") {
  RadialGrid g = make_grid(256, 25.0, 2.0);
  SBPParams params{1.0, 1.0, 0.0, 4.0};
  RadialField zero(g);
  CHECK_THROWS_AS(solve_ground_state(params, g, {}, &zero),
                  std::invalid_argument);
  SolveOptions opts;
  opts.tol = 1e-7;
  SolveResult res = solve_ground_state(params, g, opts);
  CHECK(res.converged);
  CHECK(res.report.J > 0.0);
}

TEST_CASE("solve_ground_state: p < 4 carries the no-guarantee flag") {
  RadialGrid g = make_grid(256, 25.0, 2.0);
  SBPParams params{1.0, 1.0, 1.0, 3.5};
  SolveOptions opts;
  opts.tol = 1e-6;
  SolveResult res = solve_ground_state(params, g, opts);
  CHECK_FALSE(res.nehari_guaranteed);
}

TEST_CASE("minimax_estimate: upper bound consistency") {
  RadialGrid g = make_grid(384, 30.0, 2.0);
  SBPParams params{1.0, 1.0, 1.0, 4.0};
  SolveOptions opts;
  SolveResult res = solve_ground_state(params, g, opts);
  REQUIRE(res.converged);
  const double est = minimax_estimate(params, g, 50, opts);
  CHECK(est > 0.0);
  CHECK(est >= res.report.J - 1e-9);
  CHECK(est <= 1.05 * res.report.J);
  CHECK_THROWS_AS(minimax_estimate(params, g, 0, opts), std::invalid_argument);
}

TEST_CASE("decay slope fit: pure exponential") {
  RadialGrid g = make_grid(1024, 20.0, 1.0);
  RadialField u(g);
  for (std::size_t i = 0; i < g.n; ++i) u.values[i] = std::exp(-g.nodes[i]);
  CHECK(detail::fit_tail_slope(g, u, 0.25) == doctest::Approx(-1.0).epsilon(1e-8));
}
