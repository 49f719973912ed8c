#include <doctest.h>

#include <stdexcept>
#include <cmath>
#include <random>
#include <vector>

#include <mlpbsde/problem.hpp>
#include <mlpbsde/quadrature.hpp>

using namespace mlpbsde;

TEST_CASE("family names round-trip") {
  for (const char* name : {"cos_zero", "cos_affine", "exp_affine", "cos_sine"})
    CHECK(family_name(parse_family(name)) == name);
  CHECK_THROWS_AS(parse_family("no_such_family"), std::invalid_argument);
}

TEST_CASE("cos terminal and its gaussian smoothing") {
  const auto p = builtin_problem(Family::cos_zero, 3);
  const std::vector<double> x = {0.3, -1.2, 0.4};
  CHECK(p.terminal.evaluate(x) ==
        doctest::Approx(std::cos(0.3) * std::cos(-1.2) * std::cos(0.4)).epsilon(1e-15));

  // E[cos(x_j + sqrt(s) Z)] = e^{-s/2} cos(x_j), so the product smoothing is
  // e^{-ds/2} prod cos(x_j); cross-check against Gauss-Hermite quadrature.
  const double s = 0.7;
  const double analytic = p.terminal.gaussian_smoothing(s, x);
  CHECK(analytic ==
        doctest::Approx(std::exp(-3.0 * s / 2.0) * std::cos(0.3) * std::cos(-1.2) * std::cos(0.4))
            .epsilon(1e-14));
  const QuadRule gh = gauss_hermite_normal(120, 10.0);
  double quad = 1.0;
  for (double xj : x) {
    quad *= normal_expectation(gh, [&](double z) { return std::cos(xj + std::sqrt(s) * z); });
  }
  CHECK(analytic == doctest::Approx(quad).epsilon(1e-10));
}

TEST_CASE("exp terminal smoothing matches quadrature") {
  const auto p = builtin_problem(Family::exp_affine, 2, {{"c", 0.25}});
  const std::vector<double> x = {0.5, -0.3};
  const double s = 0.9;
  const double analytic = p.terminal.gaussian_smoothing(s, x);
  // E[e^{<c, x + sqrt(s) Z>}] = e^{<c,x> + s|c|^2/2}.
  const double expected = std::exp(0.25 * (0.5 - 0.3) + s * 2.0 * 0.25 * 0.25 / 2.0);
  CHECK(analytic == doctest::Approx(expected).epsilon(1e-14));
  const QuadRule gh = gauss_hermite_normal(120, 10.0);
  double quad = 1.0;
  for (double xj : x) {
    quad *= normal_expectation(gh,
                               [&](double z) { return std::exp(0.25 * (xj + std::sqrt(s) * z)); });
  }
  CHECK(analytic == doctest::Approx(quad).epsilon(1e-10));
}

TEST_CASE("drivers evaluate as declared") {
  const auto pz = builtin_problem(Family::cos_zero, 1);
  const auto pa = builtin_problem(Family::cos_affine, 1, {{"a", 0.5}, {"b", -0.2}});
  const auto ps = builtin_problem(Family::cos_sine, 1, {{"a", 0.4}});
  const std::vector<double> x = {0.1};
  CHECK(pz.driver.evaluate(0.2, x, 3.7) == 0.0);
  CHECK(pz.driver.lipschitz_L == 0.0);
  CHECK(pa.driver.evaluate(0.2, x, 2.0) == doctest::Approx(0.5 * 2.0 - 0.2).epsilon(1e-15));
  CHECK(pa.driver.lipschitz_L == 0.5);
  REQUIRE(pa.driver.affine.has_value());
  CHECK(pa.driver.affine->a == 0.5);
  CHECK(pa.driver.affine->b == -0.2);
  CHECK(ps.driver.evaluate(0.2, x, 1.3) == doctest::Approx(0.4 * std::sin(1.3)).epsilon(1e-15));
  CHECK(ps.driver.lipschitz_L == 0.4);
  CHECK(!ps.driver.affine.has_value());
}

TEST_CASE("driver Lipschitz constants hold on random probes") {
  std::mt19937_64 rng(0xf00d);
  std::uniform_real_distribution<double> uv(-30.0, 30.0);
  for (Family fam : {Family::cos_affine, Family::cos_sine, Family::exp_affine}) {
    const auto p = builtin_problem(fam, 1);
    const std::vector<double> x = {0.0};
    const double L = p.driver.lipschitz_L;
    for (int i = 0; i < 10'000; ++i) {
      const double v = uv(rng), w = uv(rng);
      const double lhs = std::abs(p.driver.evaluate(0.3, x, v) - p.driver.evaluate(0.3, x, w));
      CHECK(lhs <= L * std::abs(v - w) + 1e-12);
    }
  }
}

TEST_CASE("parameter plumbing and rejection") {
  const auto p = builtin_problem(Family::cos_affine, 2, {{"T", 2.0}, {"a", 0.1}});
  CHECK(p.horizon_T == 2.0);
  CHECK(p.dim_d == 2);
  CHECK_THROWS_AS(builtin_problem(Family::cos_zero, 0), std::invalid_argument);
  CHECK_THROWS_AS(builtin_problem(Family::cos_zero, 1, {{"T", -1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(builtin_problem(Family::cos_zero, 1, {{"zeta", 1.0}}), std::invalid_argument);
  // cos_zero has no driver parameters, so `a` is unknown for it.
  CHECK_THROWS_AS(builtin_problem(Family::cos_zero, 1, {{"a", 0.3}}), std::invalid_argument);
  CHECK_THROWS_AS(builtin_problem(Family::cos_zero, 2'000'000), std::invalid_argument);
}

TEST_CASE("validate_problem accepts the builtin defaults") {
  CHECK(validate_problem(builtin_problem(Family::cos_zero, 1)).empty());
  CHECK(validate_problem(builtin_problem(Family::cos_affine, 1)).empty());
  CHECK(validate_problem(builtin_problem(Family::cos_affine, 5)).empty());
}

TEST_CASE("validate_problem flags out-of-range hypothesis constants") {
  auto p = builtin_problem(Family::cos_zero, 1, {{"beta", 0.2}});
  const auto warnings = validate_problem(p);
  REQUIRE(!warnings.empty());
  bool found = false;
  for (const auto& w : warnings)
    if (w.find("beta") != std::string::npos) found = true;
  CHECK(found);
}

TEST_CASE("exp_affine default growth rate satisfies its own probe check") {
  const auto p = builtin_problem(Family::exp_affine, 3);
  CHECK(p.rho > 0.0);
  CHECK(validate_problem(p).empty());
}
