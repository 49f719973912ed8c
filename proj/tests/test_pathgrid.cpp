#include <doctest.h>

#include <stdexcept>
#include <cmath>
#include <random>
#include <vector>

#include <mlpbsde/pathgrid.hpp>
#include <mlpbsde/validate.hpp>

using namespace mlpbsde;

TEST_CASE("grid operators match the brute-force set reference") {
  std::mt19937_64 rng(0x6121d);
  for (double T : {1.0, 0.7, 2.5}) {
    std::uniform_real_distribution<double> ut(0.0, T);
    for (std::int64_t M = 1; M <= 16; ++M) {
      for (int i = 0; i < 500; ++i) {
        const double t = ut(rng);
        CHECK(floor_grid(t, M, T) == floor_grid_reference(t, M, T));
        CHECK(ceil_grid(t, M, T) == ceil_grid_reference(t, M, T));
      }
      // Nodes and endpoints exactly.
      for (std::int64_t k = 0; k <= M; ++k) {
        const double node = (k == M) ? T : (static_cast<double>(k) * T) / static_cast<double>(M);
        CHECK(floor_grid(node, M, T) == floor_grid_reference(node, M, T));
        CHECK(ceil_grid(node, M, T) == ceil_grid_reference(node, M, T));
      }
    }
  }
}

TEST_CASE("grid corner semantics") {
  // T itself is excluded from the floor candidates and always a ceil candidate.
  CHECK(floor_grid(1.0, 4, 1.0) == 0.75);
  CHECK(ceil_grid(1.0, 4, 1.0) == 1.0);
  CHECK(floor_grid(0.0, 4, 1.0) == 0.0);
  CHECK(ceil_grid(0.0, 4, 1.0) == 0.25);
  CHECK(floor_grid(0.25, 4, 1.0) == 0.25);
  CHECK(ceil_grid(0.25, 4, 1.0) == 0.5);
  // M = 1: only {0} below T, so floor is 0 everywhere and ceil is T.
  CHECK(floor_grid(0.99, 1, 1.0) == 0.0);
  CHECK(ceil_grid(0.01, 1, 1.0) == 1.0);
  CHECK_THROWS_AS(floor_grid(-0.1, 2, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ceil_grid(1.1, 2, 1.0), std::invalid_argument);
}

TEST_CASE("piecewise-linear interpolation is exact at nodes and convex between") {
  const GridSpec grid{3, 2, 1.0};  // 9 steps
  REQUIRE(grid.num_steps() == 9);
  std::vector<double> nodes(10);
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> uv(-5.0, 5.0);
  for (auto& v : nodes) v = uv(rng);
  for (std::int64_t k = 0; k <= 9; ++k)
    CHECK(interpolate(nodes, grid, grid.node(k)) == nodes[static_cast<std::size_t>(k)]);
  // Midpoint of a cell is the average of its endpoints.
  const double mid = 0.5 * (grid.node(3) + grid.node(4));
  CHECK(interpolate(nodes, grid, mid) ==
        doctest::Approx(0.5 * (nodes[3] + nodes[4])).epsilon(1e-15));
  std::vector<double> wrong(9);
  CHECK_THROWS_AS(interpolate(wrong, grid, 0.5), std::invalid_argument);
}

TEST_CASE("interpolation error bound holds on randomized cases") {
  std::mt19937_64 rng(0xabcde);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int c = 0; c < 50; ++c) {
    const double T = 0.5 + u01(rng);
    std::vector<double> part{0.0};
    const int m = 2 + static_cast<int>(u01(rng) * 6);
    for (int i = 0; i < m; ++i) part.push_back(u01(rng) * T);
    part.push_back(T);
    std::sort(part.begin(), part.end());
    part.erase(std::unique(part.begin(), part.end()), part.end());
    const double a = 1.0 + 5.0 * u01(rng);
    InterpCase ic{[a](double t) { return std::sin(a * t); }, part, 1.0, 1200};
    CHECK(check_interp_error_bound(ic));
    CHECK(check_interp_holder(ic));
    // The same smooth function under the alpha in (1, 2] reading.
    InterpCase ic2 = ic;
    ic2.alpha = 1.0 + u01(rng);
    CHECK(check_interp_error_bound(ic2));
  }
}

TEST_CASE("interpolation bound survives a coarse partition on a fast oscillation") {
  // Max step 0.5 with seminorm ~20 makes the right-hand side ~5 while the
  // actual interpolation error is ~1; the inequality must still be the one
  // doing the work (not slack in the checker).
  InterpCase tight{[](double t) { return std::sin(20.0 * t); }, {0.0, 0.5, 1.0}, 1.0, 2000};
  CHECK(check_interp_error_bound(tight));
}

TEST_CASE("path estimator realizes the telescoped interpolants") {
  // Straight-line transcription at n = 2, M = 2: level 0 interpolates the
  // field U^{[0]}_{2,2} on the 2-step grid; level 1 adds U^{[1]}_{1,2} on the
  // 4-step grid minus its own 2-step interpolant.
  const auto p = builtin_problem(Family::cos_affine, 1);
  const MasterSeed seed{909};
  const auto est = path_estimate(p, seed, 2, 2);
  REQUIRE(est.fine_nodes.size() == 5);

  const BrownianPath w = brownian_path(seed, 1, 2, 2, 1.0);
  for (std::size_t k = 0; k < 5; ++k) CHECK(w.node(k)[0] == est.w_path.node(k)[0]);

  CostCounters scratch;
  const MlpField f0(p, seed, ThetaPath({0}), MlpConfig{2, 2});
  const MlpField f1(p, seed, ThetaPath({1}), MlpConfig{1, 2});

  // Level-0 values at the 2-step grid {0, 1/2, 1}.
  double v0[3];
  for (int j = 0; j < 3; ++j) {
    const double tj = (j == 2) ? 1.0 : j * 0.5;
    v0[j] = f0(tj, std::span<const double>(w.node(static_cast<std::size_t>(2 * j)), 1), scratch);
  }
  // Level-1 values at the 4-step grid.
  double v1[5];
  for (int j = 0; j < 5; ++j) {
    const double tj = (j == 4) ? 1.0 : j * 0.25;
    v1[j] = f1(tj, std::span<const double>(w.node(static_cast<std::size_t>(j)), 1), scratch);
  }
  // Expected fine-node values: interpolants evaluated at {k/4}.
  for (int k = 0; k <= 4; ++k) {
    double lvl0;
    if (k % 2 == 0) {
      lvl0 = v0[k / 2];
    } else {
      lvl0 = 0.5 * v0[k / 2] + 0.5 * v0[k / 2 + 1];
    }
    const double lvl1_fine = v1[k];
    const double lvl1_coarse = (k % 2 == 0) ? v1[k] : 0.5 * v1[k - 1] + 0.5 * v1[k + 1];
    const double expected = lvl0 + (lvl1_fine - lvl1_coarse);
    CHECK(std::abs(est.fine_nodes[static_cast<std::size_t>(k)] - expected) <= 1e-14);
  }
}

TEST_CASE("path terminal and interpolation accessors") {
  const auto p = builtin_problem(Family::cos_zero, 1);
  const auto est = path_estimate(p, MasterSeed{4}, 2, 3);
  const std::size_t last = est.fine_nodes.size() - 1;
  const double g = p.terminal.evaluate(std::span<const double>(est.w_path.node(last), 1));
  CHECK(std::abs(est.fine_nodes[last] - g) <= 1e-12);
  CHECK(path_value(est, 1.0) == est.fine_nodes[last]);
  CHECK(path_value(est, 0.0) == est.fine_nodes[0]);
}

TEST_CASE("path serialization carries every node") {
  const auto p = builtin_problem(Family::cos_zero, 2);
  const auto est = path_estimate(p, MasterSeed{8}, 1, 3);
  const std::string csv = path_to_csv(est);
  CHECK(csv.rfind("k,t_k,W_1,W_2,Y_k\n", 0) == 0);
  std::size_t lines = 0;
  for (char ch : csv)
    if (ch == '\n') ++lines;
  CHECK(lines == 5);  // header + 4 nodes
  const std::string js = path_to_json(est);
  CHECK(js.find("\"counters\"") != std::string::npos);
  CHECK(js.find("\"seed\": 8") != std::string::npos);
}

TEST_CASE("path estimator rejects bad configurations") {
  const auto p = builtin_problem(Family::cos_zero, 1);
  CHECK_THROWS_AS(path_estimate(p, MasterSeed{1}, 0, 2), std::invalid_argument);
  CHECK_THROWS_AS(path_estimate(p, MasterSeed{1}, 8, 100), std::overflow_error);
}
