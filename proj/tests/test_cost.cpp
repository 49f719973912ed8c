#include <doctest.h>

#include <stdexcept>
#include <cmath>
#include <vector>

#include <mlpbsde/cost.hpp>
#include <mlpbsde/mlp.hpp>
#include <mlpbsde/oracle.hpp>
#include <mlpbsde/pathgrid.hpp>
#include <mlpbsde/problem.hpp>

using namespace mlpbsde;

TEST_CASE("hand-derived recursion values") {
  CHECK(cost_mlp_bound(0, 5, 7) == 0);
  // C(1) = alpha*M + M*(1 + alpha): M = 2, alpha = 3 -> 6 + 8 = 14.
  CHECK(cost_mlp_bound(1, 2, 3) == 14);
  // F(0) = alpha*(M^0 + 1) = 2 alpha.
  CHECK(cost_path_bound(0, 3, 4) == 8);
  // F(1) at M = 1, alpha = 1: C(1) = 1 + 1*(1+1) = 3; F = 1*2 + 2*3 = 8.
  CHECK(cost_path_bound(1, 1, 1) == 8);
}

TEST_CASE("closed forms dominate the recursions") {
  for (int n = 0; n <= 6; ++n) {
    for (std::int64_t M = 1; M <= 6; ++M) {
      const std::int64_t alpha = 4;
      CHECK(cost_mlp_bound(n, M, alpha) <= cost_mlp_closed(n, M, alpha));
      CHECK(cost_path_bound(n, M, alpha) <= cost_path_closed(n, M, alpha));
    }
  }
}

TEST_CASE("error bound formulas at pinned points") {
  // e^{1/2} * 1 * 50^1 with trivial Lyapunov factor.
  CHECK(err_bound_mlp(0, 1, 0.0, 1.0, 1.0) ==
        doctest::Approx(std::exp(0.5) * 50.0).epsilon(1e-14));
  // Doubling T at L = 0 changes nothing.
  CHECK(err_bound_mlp(2, 3, 0.0, 1.0, 1.0) == err_bound_mlp(2, 3, 0.0, 2.0, 1.0));
  // 8 * e^{1/2} * 2500 * 3^{1/4}.
  CHECK(err_bound_path(1, 1, 0.0, 1.0, 0.0, 1.0, 3.0) ==
        doctest::Approx(8.0 * std::exp(0.5) * 2500.0 * std::pow(3.0, 0.25)).epsilon(1e-14));
  CHECK_THROWS_AS(err_bound_path(0, 1, 0.0, 1.0, 0.0, 1.0, 3.0), std::invalid_argument);
  CHECK(normal_fourth_moment(1) == 3.0);
  CHECK(normal_fourth_moment(3) == 15.0);
}

TEST_CASE("measured cost sits below the recursion for a wide sweep") {
  for (int d : {1, 5, 10}) {
    const auto p = builtin_problem(Family::cos_affine, d);
    std::vector<double> x(static_cast<std::size_t>(d), 0.2);
    for (int n = 1; n <= 3; ++n) {
      for (std::int64_t M = 1; M <= 3; ++M) {
        CostCounters cc;
        mlp_evaluate(p, MasterSeed{17}, ThetaPath{}, MlpConfig{n, M}, 0.1, x, cc);
        CHECK(static_cast<std::int64_t>(cc.total()) <= cost_mlp_bound(n, M, d + 3));
        const auto est = path_estimate(p, MasterSeed{17}, n, M);
        CHECK(static_cast<std::int64_t>(est.counters.total()) <= cost_path_bound(n, M, d + 3));
      }
    }
  }
}

TEST_CASE("measured cost is exactly affine in the dimension") {
  auto total = [](int d) {
    const auto p = builtin_problem(Family::cos_affine, d);
    std::vector<double> x(static_cast<std::size_t>(d), 0.2);
    CostCounters cc;
    mlp_evaluate(p, MasterSeed{23}, ThetaPath{}, MlpConfig{3, 3}, 0.1, x, cc);
    return static_cast<std::int64_t>(cc.total());
  };
  const std::int64_t B = total(2) - total(1);
  CHECK(total(10) - total(5) == 5 * B);
  CHECK(total(5) - total(3) == 2 * B);
}

TEST_CASE("bound report carries the full chain") {
  const auto p = builtin_problem(Family::cos_affine, 2);
  const auto r = bound_report(p, 2, 3);
  CHECK(r.alpha == 5);
  CHECK(r.cost_mlp_exact <= r.cost_mlp_closed);
  CHECK(r.cost_path_exact <= r.cost_path_closed);
  CHECK(r.err_mlp > 0.0);
  CHECK(r.err_path > 0.0);
  const std::string js = r.to_json();
  CHECK(js.find("\"alpha\": 5") != std::string::npos);
  CHECK(js.find("cost_path_exact") != std::string::npos);
}

TEST_CASE("level selection against the closed-form reference") {
  const auto p = builtin_problem(Family::cos_zero, 1);
  const auto ref = affine_closed_form(p);
  PilotConfig pilot;
  pilot.replications = 10;
  pilot.seed = MasterSeed{3};

  // A huge tolerance is met at the first level.
  CHECK(select_n(p, ref, 10.0, pilot) == 1);

  // Moderate tolerance: the returned n is the first whose pilot error beats
  // it, revalidated directly.
  const double eps = 0.15;
  const int n = select_n(p, ref, eps, pilot);
  CHECK(pilot_sup_rmse(p, ref, n, n, pilot.replications, pilot.seed) < eps);
  if (n > 1) CHECK(pilot_sup_rmse(p, ref, n - 1, n - 1, pilot.replications, pilot.seed) >= eps);

  // Unreachable tolerance hits the guard.
  pilot.max_n = 3;
  CHECK_THROWS_AS(select_n(p, ref, 1e-12, pilot), std::runtime_error);
}
