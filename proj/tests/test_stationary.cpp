#include <doctest.h>

#include "gaam/stationary.hpp"
#include "test_util.hpp"

using namespace gaam;
using namespace testutil;

TEST_CASE("picard: zero forcing fixes U = 0 immediately") {
  auto grid = make_grid(3, 8);
  const auto p = make_params();
  const auto sol = picard_solve(Field::zero(grid), p);
  CHECK(sol.converged);
  CHECK(sol.iterations == 1);
  CHECK(sol.field.coef.abs().maxCoeff() == 0.0);
  CHECK(sol.residual_l2 == 0.0);
  CHECK(sol.energy_ratio == 0.0);
}

TEST_CASE("picard: leading order is the linear balance, defect is quadratic") {
  auto grid = make_grid(3, 8);
  const auto p = make_params(2, 1, 1, 1, 1);
  // Generic small forcing; shear-only combinations would make the projected
  // transport term vanish identically.
  const Field f1 = random_divfree_field(grid, 201, 0.004);

  const auto sol1 = picard_solve(f1, p, 1e-14);
  REQUIRE(sol1.converged);
  const Field lin1 = damped_diffusion_apply(f1, p, ApplyMode::invert);
  const double defect1 = strong_distance(sol1.field, lin1, p.beta);
  const double fn1 = sobolev_norm(f1, p.beta / 2);
  CHECK(defect1 < 10 * fn1 * fn1);

  // Scaling the forcing by 3 scales the defect by about 9.
  const Field f3 = 3.0 * f1;
  const auto sol3 = picard_solve(f3, p, 1e-14);
  REQUIRE(sol3.converged);
  const double defect3 =
      strong_distance(sol3.field, damped_diffusion_apply(f3, p, ApplyMode::invert),
                      p.beta);
  CHECK(defect3 / defect1 == doctest::Approx(9.0).epsilon(0.15));
}

TEST_CASE("picard solution is stationary under time marching") {
  auto grid = make_grid(3, 16);
  const auto p = make_params(2, 1.5, 1, 1.1, 1, 3, 16);
  const Field f = random_divfree_field(grid, 7, 0.03);
  const auto sol = picard_solve(f, p, 1e-13);
  REQUIRE(sol.converged);
  REQUIRE(sol.residual_l2 < 1e-11);

  SimulationConfig<double> cfg;
  cfg.dt = 0.01;
  cfg.t_end = 5.0 / p.gamma;
  cfg.record_stride = 50;
  const auto rec = simulate(sol.field, f, p, cfg, &sol.field);
  double drift = 0;
  for (double d : rec.dist_strong) drift = std::max(drift, d);
  CHECK(drift < 1e-8);
}

TEST_CASE("a-priori energy bound holds for every converged solution") {
  Rng rng(1);
  for (int i = 0; i < 6; ++i) {
    auto grid = make_grid(3, 8);
    const auto p = make_params(rng.uniform(1.0, 2.5), rng.uniform(0.0, 2.5), 1,
                               rng.uniform(0.8, 1.25), 1);
    const Field f = random_divfree_field(grid, 100 + i, 0.04);
    const auto sol = picard_solve(f, p, 1e-13);
    REQUIRE(sol.converged);
    CHECK(sol.energy_ratio <= 1.0 + 1e-9);
  }
}

TEST_CASE("residual certificate matches an independent evaluation") {
  auto grid = make_grid(3, 8);
  const auto p = make_params(1.8, 1.2, 0.9, 1.1, 1.2);
  const Field f = random_divfree_field(grid, 17, 0.05);
  const auto sol = picard_solve(f, p, 1e-13);
  REQUIRE(sol.converged);
  // Recompute the residual term by term: nu (-Lap)^{a/2} U + gamma U + N(U) - f.
  const Field res = p.nu * fractional_laplacian(sol.field, p.alpha) +
                    p.gamma * sol.field + nonlinear_term(sol.field, p) - f;
  CHECK(sol.residual_l2 ==
        doctest::Approx(std::sqrt(sobolev_norm_sq(res, 0.0))).epsilon(1e-12));
  CHECK(sol.residual_l2 < 1e-11);
}

TEST_CASE("uniqueness under the strong smallness condition: multi-start") {
  auto grid = make_grid(3, 8);
  const auto p = make_params(2, 2, 1, 1, 1);
  const Field f = random_divfree_field(grid, 23, 0.01);
  REQUIRE(smallness_report(f, p).verdict == StabilityVerdict::asymptotic);

  const double tol = 1e-12;
  const auto base = picard_solve(f, p, tol);
  REQUIRE(base.converged);
  for (int i = 0; i < 5; ++i) {
    const Field start = random_divfree_field(grid, 300 + i, 0.5);
    const auto sol = picard_solve(f, p, tol, 400, 1.0, &start);
    REQUIRE(sol.converged);
    CHECK(strong_distance(sol.field, base.field, p.beta) < 10 * tol);
  }
}

TEST_CASE("continuation: [0] schedule reduces to picard") {
  auto grid = make_grid(3, 8);
  const auto p = make_params(2, 1, 1, 1, 1);
  const Field f = random_divfree_field(grid, 29, 0.05);
  const auto a = picard_solve(f, p, 1e-13);
  const auto b = continuation_solve(f, p, {0.0}, 1e-13);
  REQUIRE(a.converged);
  REQUIRE(b.converged);
  CHECK((a.field.coef - b.field.coef).abs().maxCoeff() == 0.0);
}

TEST_CASE("continuation: zero forcing is fixed at every eps") {
  auto grid = make_grid(3, 8);
  const auto sol =
      continuation_solve(Field::zero(grid), make_params(), {1.0, 0.5, 0.25, 0.0});
  CHECK(sol.converged);
  CHECK(sol.field.coef.abs().maxCoeff() == 0.0);
  for (const auto& [eps, res] : sol.continuation_path) CHECK(res == 0.0);
}

TEST_CASE("continuation agrees with the damped fixed-point oracle at 16^3") {
  auto grid = make_grid(3, 16);
  const auto p = make_params(2, 1, 1, 1, 1, 3, 16);
  // Moderate forcing: plain iteration still contracts but slowly; the
  // under-relaxed (omega = 0.5) solve is the independent oracle.
  const Field f = random_divfree_field(grid, 37, 0.25);

  std::vector<double> schedule;
  for (int i = 0; i <= 10; ++i) schedule.push_back(std::pow(0.5, i));
  schedule.push_back(0.0);
  const auto cont = continuation_solve(f, p, schedule, 1e-12, 400);
  const auto damped = picard_solve(f, p, 1e-12, 2000, 0.5);
  REQUIRE(cont.converged);
  REQUIRE(damped.converged);
  CHECK(strong_distance(cont.field, damped.field, p.beta) < 1e-9);
  CHECK(cont.residual_l2 < 1e-10);
}

TEST_CASE("continuation validates its schedule") {
  auto grid = make_grid(3, 8);
  const Field f = Field::zero(grid);
  CHECK_THROWS_AS((void)continuation_solve(f, make_params(), {0.5, 0.5, 0.0}),
                  const ConfigError&);
  CHECK_THROWS_AS((void)continuation_solve(f, make_params(), {0.25, 0.5, 0.0}),
                  const ConfigError&);
  CHECK_THROWS_AS((void)continuation_solve(f, make_params(), {1.0, 0.5}),
                  const ConfigError&);
}

TEST_CASE("non-convergence reports the partial path") {
  auto grid = make_grid(3, 8);
  const auto p = make_params(2, 0, 0.05, 1, 0.05);
  // Strong forcing against weak damping: the plain iteration diverges.
  const Field f = random_divfree_field(grid, 41, 5.0);
  const auto sol = picard_solve(f, p, 1e-12, 50);
  CHECK(!sol.converged);
  CHECK(sol.iterations >= 1);
  CHECK(sol.iterations <= 50);
  CHECK(sol.iterate_norms.size() == std::size_t(sol.iterations));
}

TEST_CASE("smallness report: verdict boundaries") {
  auto grid = make_grid(3, 8);
  const auto p = make_params(2, 2, 1, 1, 1);  // a = b = 1, c = 1
  SUBCASE("zero forcing is asymptotic") {
    const auto rep = smallness_report(Field::zero(grid), p);
    CHECK(rep.lhs == 0.0);
    CHECK(rep.verdict == StabilityVerdict::asymptotic);
  }
  SUBCASE("boundary lhs = rhs_asymptotic is inclusive") {
    Field f = leray_project(
        single_mode_field(grid, {1, 0, 0}, {{{0, 0}, {1, 0}, {0, 0}}}));
    const double n = sobolev_norm(f, p.beta / 2);
    f = (1.0 / n) * f;  // ||f||_{H^{beta/2}} = 1 and C b/a^{3/2} = 1
    const auto rep = smallness_report(f, p, 1.0);
    CHECK(rep.lhs == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.rhs_asymptotic == 1.0);
    CHECK(rep.rhs_orbital == 2.0);
    CHECK(rep.verdict == StabilityVerdict::asymptotic);

    const auto mid = smallness_report(1.5 * f, p, 1.0);
    CHECK(mid.verdict == StabilityVerdict::orbital_only);
    const auto large = smallness_report(3.0 * f, p, 1.0);
    CHECK(large.verdict == StabilityVerdict::neither);
  }
}

TEST_CASE("regularity gain: zero forcing, harmonic support, refinement") {
  const auto p8 = make_params(2, 1, 1, 1, 1, 3, 8);
  auto g8 = make_grid(3, 8);
  CHECK(regularity_gain_diagnostic(Field::zero(g8), Field::zero(g8), p8).ratio ==
        0.0);

  // Plane-supported forcing: the solution spectrum lives on the harmonic
  // lattice of the forced modes, and refinement must shrink the outer-third
  // tail.
  auto g16 = make_grid(3, 16);
  const auto p16 = make_params(2, 1, 1, 1, 1, 3, 16);
  auto g32 = make_grid(3, 32);
  const auto p32 = make_params(2, 1, 1, 1, 1, 3, 32);

  const auto make_f = [](const testutil::GridPtr& g) {
    return leray_project(
        single_mode_field(g, {1, 0, 0}, {{{0, 0}, {0.05, 0.02}, {0, 0}}}) +
        single_mode_field(g, {0, 1, 1}, {{{0.04, -0.03}, {0, 0}, {0, 0}}}));
  };
  const auto s16 = picard_solve(make_f(g16), p16, 1e-13);
  const auto s32 = picard_solve(make_f(g32), p32, 1e-13);
  REQUIRE(s16.converged);
  REQUIRE(s32.converged);

  const auto r16 = regularity_gain_diagnostic(s16.field, make_f(g16), p16);
  const auto r32 = regularity_gain_diagnostic(s32.field, make_f(g32), p32);
  CHECK(r32.tail_fraction < r16.tail_fraction);
  CHECK(r32.tail_fraction < 1e-6);
  // Harmonic support: combinations m(1,0,0) + n(0,1,1) all have n_y = n_z.
  for (Eigen::Index m = 0; m < g16->n_modes(); ++m) {
    const auto& n = g16->mode(m);
    if (n[1] != n[2])
      CHECK(std::abs(s16.field.coef(m, 0)) + std::abs(s16.field.coef(m, 1)) +
                std::abs(s16.field.coef(m, 2)) <
            1e-13);
  }
  // Ratio stable under refinement.
  CHECK(std::abs(r32.ratio - r16.ratio) / r16.ratio < 0.1);
}

TEST_CASE("generic small-forcing ratio is refinement-stable") {
  const auto spectrum = [](double k2) { return 1.0 / std::pow(1.0 + k2, 3.0); };
  auto g16 = make_grid(3, 16);
  auto g32 = make_grid(3, 32);
  const auto p16 = make_params(2, 1, 1, 1, 1, 3, 16);
  const auto p32 = make_params(2, 1, 1, 1, 1, 3, 32);
  const Field f16 = random_divfree_field(g16, 55, 0.05, spectrum);
  // Same coefficients embedded in the finer grid.
  Field f32(g32);
  for (Eigen::Index m = 0; m < g16->n_modes(); ++m) {
    const auto& n = g16->mode(m);
    const auto m32 = find_mode(*g32, n[0], n[1], n[2]);
    for (int j = 0; j < 3; ++j) f32.coef(m32, j) = f16.coef(m, j);
  }
  f32.divergence_free = true;
  const auto s16 = picard_solve(f16, p16, 1e-13);
  const auto s32 = picard_solve(f32, p32, 1e-13);
  REQUIRE(s16.converged);
  REQUIRE(s32.converged);
  const auto r16 = regularity_gain_diagnostic(s16.field, f16, p16);
  const auto r32 = regularity_gain_diagnostic(s32.field, f32, p32);
  CHECK(std::abs(r32.ratio - r16.ratio) / r16.ratio < 0.1);
}
