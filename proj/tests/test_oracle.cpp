#include <doctest.h>

#include <stdexcept>
#include <cmath>
#include <random>
#include <vector>

#include <mlpbsde/oracle.hpp>
#include <mlpbsde/problem.hpp>

using namespace mlpbsde;

TEST_CASE("closed form at pinned points") {
  const auto p0 = builtin_problem(Family::cos_zero, 1);
  const auto r0 = affine_closed_form(p0);
  CHECK(r0.at(0.0, 0.0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
  CHECK(r0.at(1.0, 0.3) == doctest::Approx(std::cos(0.3)).epsilon(1e-14));

  const auto p1 = builtin_problem(Family::cos_affine, 1, {{"a", 1.0}, {"b", 0.0}});
  const auto r1 = affine_closed_form(p1);
  CHECK(r1.at(0.0, 0.0) == doctest::Approx(std::exp(0.5)).epsilon(1e-14));

  // b-only driver shifts by b*(T - t).
  const auto p2 = builtin_problem(Family::cos_affine, 1, {{"a", 0.0}, {"b", 0.25}});
  const auto r2 = affine_closed_form(p2);
  CHECK(r2.at(0.4, 0.0) ==
        doctest::Approx(std::exp(-0.3) + 0.25 * 0.6).epsilon(1e-14));
}

TEST_CASE("closed form solves the fixed-point equation") {
  // Residual of the quadrature-evaluated right-hand side, cross-checking the
  // formula rather than the implementation that produced it.
  const auto p = builtin_problem(Family::cos_affine, 1, {{"a", 1.0}, {"b", 0.0}});
  const auto ref = affine_closed_form(p);
  CHECK(std::abs(sfpe_residual(p, ref, 0.0, 0.0)) < 1e-8);
  CHECK(std::abs(sfpe_residual(p, ref, 0.35, -0.8)) < 1e-8);
}

TEST_CASE("closed form requires its hypotheses") {
  auto p = builtin_problem(Family::cos_sine, 1);
  CHECK_THROWS_AS(affine_closed_form(p), std::invalid_argument);
}

TEST_CASE("quadrature fixed point agrees with the closed form") {
  const auto p = builtin_problem(Family::cos_affine, 1);
  const auto closed = affine_closed_form(p);
  const auto pic = picard_quadrature(p);
  CHECK(pic.accuracy < 1e-8);
  std::mt19937_64 rng(314);
  std::uniform_real_distribution<double> ut(0.0, 1.0), ux(-2.0, 2.0);
  for (int i = 0; i < 20; ++i) {
    const double t = ut(rng), x = ux(rng);
    CHECK(std::abs(pic.at(t, x) - closed.at(t, x)) < 1e-6);
  }
  // Terminal slice: limited by the spline resolution of the space grid.
  CHECK(std::abs(pic.at(1.0, 0.7) - std::cos(0.7)) < 1e-7);
}

TEST_CASE("quadrature fixed point is self-consistent for the sine driver") {
  const auto p = builtin_problem(Family::cos_sine, 1);
  const auto pic = picard_quadrature(p);
  CHECK(std::abs(sfpe_residual(p, pic, 0.0, 0.0)) < 1e-8);
  CHECK(std::abs(sfpe_residual(p, pic, 0.5, 0.4)) < 1e-8);
}

TEST_CASE("quadrature fixed point refuses non-contractive horizons") {
  const auto p = builtin_problem(Family::cos_affine, 1, {{"a", 1.2}});
  CHECK_THROWS_AS(picard_quadrature(p), std::invalid_argument);
  const auto p5 = builtin_problem(Family::cos_affine, 5);
  CHECK_THROWS_AS(picard_quadrature(p5), std::invalid_argument);  // d != 1
}

TEST_CASE("nested Monte Carlo sanity") {
  // t = T collapses to the terminal value with zero spread.
  const auto p = builtin_problem(Family::cos_affine, 1);
  const double x0[1] = {0.4};
  const auto at_T = nested_mc(p, 1.0, x0, 1, 50);
  CHECK(at_T.value == doctest::Approx(std::cos(0.4)).epsilon(1e-15));
  CHECK(at_T.stderr_ == 0.0);

  // Zero driver: flat Monte Carlo of the smoothed terminal.
  const auto pz = builtin_problem(Family::cos_zero, 1);
  const auto rz = nested_mc(pz, 0.0, x0, 1, 20'000);
  const double gz = pz.terminal.gaussian_smoothing(1.0, x0);
  CHECK(std::abs(rz.value - gz) <= 4.0 * rz.stderr_);

  // Affine driver, d = 5 against the closed form.
  const auto p5 = builtin_problem(Family::cos_affine, 5);
  const auto closed5 = affine_closed_form(p5);
  const std::vector<double> origin(5, 0.0);
  const auto r5 = nested_mc(p5, 0.0, origin, 2, 400);
  CHECK(std::abs(r5.value - closed5.evaluate(0.0, origin)) <= 4.0 * r5.stderr_);

  CHECK_THROWS_AS(nested_mc(p, 0.0, x0, 3, 100), std::invalid_argument);
  CHECK_THROWS_AS(nested_mc(p, 0.0, x0, 2, 20'000), std::overflow_error);
}

TEST_CASE("a-priori size of the cos-family solutions") {
  // |u| <= 1 + |b| T for the cos families under affine drivers.
  for (Family fam : {Family::cos_zero, Family::cos_affine}) {
    const auto p = builtin_problem(fam, 1);
    const auto ref = affine_closed_form(p);
    const double b = p.driver.affine ? p.driver.affine->b : 0.0;
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> ut(0.0, 1.0), ux(-3.0, 3.0);
    for (int i = 0; i < 200; ++i)
      CHECK(std::abs(ref.at(ut(rng), ux(rng))) <= 1.0 + std::abs(b) * p.horizon_T + 1e-9);
  }
}

TEST_CASE("Hoelder difference quotients stay bounded") {
  const auto p = builtin_problem(Family::cos_affine, 1);
  const auto ref = affine_closed_form(p);
  std::mt19937_64 rng(56);
  std::uniform_real_distribution<double> ut(0.0, 1.0), ux(-2.0, 2.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double s = ut(rng), t = ut(rng), x = ux(rng), y = ux(rng);
    const double den = std::sqrt(std::abs(s - t)) + std::abs(x - y);
    if (den < 1e-6) continue;
    worst = std::max(worst, std::abs(ref.at(s, x) - ref.at(t, y)) / den);
  }
  CHECK(worst < 10.0);  // finite, O(1) scale for this family
}

TEST_CASE("second-order Lipschitz gap inequality") {
  const auto sinf = [](double v) { return std::sin(v); };
  SUBCASE("degenerate quadruples give zero left side") {
    const auto g = lipschitz_gap_check(sinf, 1.0, 1.0, 0.7, 0.7, -0.3, -0.3);
    CHECK(g.lhs == 0.0);
    CHECK(g.holds);
  }
  SUBCASE("affine maps attain the first term with equality") {
    const auto lin = [](double v) { return -2.5 * v + 1.0; };
    const auto g = lipschitz_gap_check(lin, 2.5, 0.0, 1.3, 0.2, -0.7, 2.2);
    CHECK(g.holds);
    CHECK(g.lhs == doctest::Approx(g.rhs).epsilon(1e-12));
  }
  SUBCASE("random quadruples for the sine") {
    std::mt19937_64 rng(0x5e11);
    std::uniform_real_distribution<double> box(-10.0, 10.0);
    for (int i = 0; i < 100'000; ++i) {
      const auto g = lipschitz_gap_check(sinf, 1.0, 1.0, box(rng), box(rng), box(rng), box(rng));
      CHECK(g.holds);
    }
  }
}
