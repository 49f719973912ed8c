#include <doctest.h>

#include <stdexcept>
#include <cmath>
#include <cstring>
#include <set>
#include <vector>

#include <mlpbsde/randomness.hpp>

using namespace mlpbsde;

TEST_CASE("draws are pure functions of (seed, path, dimension)") {
  const MasterSeed seed{42};
  const ThetaPath th = ThetaPath{}.child(1, 7).child(-2, 3);
  const NodeDraws a = node_draws(seed, th, 4);
  const NodeDraws b = node_draws(seed, th, 4);
  CHECK(a.r == b.r);
  CHECK(a.z == b.z);

  const NodeDraws c = node_draws(MasterSeed{43}, th, 4);
  CHECK(a.r != c.r);
  const NodeDraws e = node_draws(seed, th.child(0, 1), 4);
  CHECK(a.r != e.r);
}

TEST_CASE("child appends two path elements") {
  ThetaPath root;
  CHECK(root.empty());
  const ThetaPath c = root.child(2, -5);
  REQUIRE(c.elements().size() == 2);
  CHECK(c.elements()[0] == 2);
  CHECK(c.elements()[1] == -5);
  const ThetaPath cc = c.child(0, 9);
  CHECK(cc.elements() == std::vector<std::int64_t>({2, -5, 0, 9}));
}

TEST_CASE("normal_draws matches the z layout of node_draws") {
  const MasterSeed seed{7};
  const ThetaPath th = ThetaPath{}.child(0, -3);
  const NodeDraws nd = node_draws(seed, th, 6);
  double z[6];
  normal_draws(seed, th, 6, z);
  for (int j = 0; j < 6; ++j) CHECK(z[j] == nd.z[static_cast<std::size_t>(j)]);
}

TEST_CASE("encoding is injective over many distinct paths") {
  // Length framing keeps e.g. [1] and [1,0] distinct; collisions across a
  // large family of short paths would break stream independence.
  std::set<std::vector<std::uint8_t>> seen;
  std::size_t count = 0;
  for (std::int64_t a = -20; a <= 20; ++a) {
    seen.insert(ThetaPath({a}).encode());
    ++count;
    for (std::int64_t b = -20; b <= 20; ++b) {
      seen.insert(ThetaPath({a, b}).encode());
      ++count;
      if ((a + b) % 7 == 0) {
        seen.insert(ThetaPath({a, b, a * 3 - b}).encode());
        ++count;
      }
    }
  }
  seen.insert(ThetaPath{}.encode());
  ++count;
  CHECK(seen.size() == count);
}

TEST_CASE("derived stream keys separate close paths") {
  std::set<std::uint64_t> words;
  const MasterSeed seed{1};
  int n = 0;
  for (std::int64_t l = -8; l <= 8; ++l) {
    for (std::int64_t i = -8; i <= 8; ++i) {
      const StreamKey k = derive_key(seed, ThetaPath({l, i}));
      words.insert(stream_word(k, 0));
      ++n;
    }
  }
  CHECK(words.size() == static_cast<std::size_t>(n));
}

TEST_CASE("uniform component has the right first moment") {
  const MasterSeed seed{2026};
  const int N = 100'000;
  double sum = 0.0;
  for (int i = 0; i < N; ++i) {
    const NodeDraws nd = node_draws(seed, ThetaPath({1, i}), 1);
    CHECK(nd.r >= 0.0);
    CHECK(nd.r < 1.0);
    sum += nd.r;
  }
  const double mean = sum / N;
  const double tol = 3.0 * std::sqrt(1.0 / 12.0 / N);
  CHECK(std::abs(mean - 0.5) < tol);
}

TEST_CASE("normal components are standardized and uncorrelated") {
  const MasterSeed seed{99};
  const int N = 20'000, d = 3;
  double mean[d] = {0, 0, 0};
  double cov[d][d] = {};
  for (int i = 0; i < N; ++i) {
    const NodeDraws nd = node_draws(seed, ThetaPath({2, i}), d);
    for (int a = 0; a < d; ++a) mean[a] += nd.z[static_cast<std::size_t>(a)];
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        cov[a][b] += nd.z[static_cast<std::size_t>(a)] * nd.z[static_cast<std::size_t>(b)];
  }
  for (int a = 0; a < d; ++a) CHECK(std::abs(mean[a] / N) < 0.03);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      const double c = cov[a][b] / N;
      if (a == b) {
        CHECK(std::abs(c - 1.0) < 0.05);
      } else {
        CHECK(std::abs(c) < 0.05);
      }
    }
  }
}

TEST_CASE("Brownian path starts at zero with variance T at the end") {
  const int d = 2, n = 2;
  const std::int64_t M = 4;
  const double T = 1.5;
  double sumsq = 0.0;
  int count = 0;
  for (std::uint64_t s = 0; s < 2000; ++s) {
    const BrownianPath w = brownian_path(MasterSeed{s}, d, M, n, T);
    REQUIRE(w.num_nodes() == 17);
    for (int j = 0; j < d; ++j) CHECK(w.node(0)[j] == 0.0);
    for (int j = 0; j < d; ++j) {
      sumsq += w.node(16)[j] * w.node(16)[j];
      ++count;
    }
  }
  CHECK(std::abs(sumsq / count - T) < 0.1);
}

TEST_CASE("Brownian increments come from the reserved sentinel sub-stream") {
  const MasterSeed seed{5};
  const int d = 2;
  const std::int64_t M = 3;
  const int n = 2;
  const double T = 1.0;
  const BrownianPath w = brownian_path(seed, d, M, n, T);
  REQUIRE(w.num_nodes() == 10);
  const double sqrt_dt = std::sqrt(T / 9.0);
  double z[2];
  for (std::int64_t k = 1; k <= 9; ++k) {
    normal_draws(seed, ThetaPath{}.child(kBrownianSentinel, k), d, z);
    for (int j = 0; j < d; ++j) {
      const double inc = w.node(static_cast<std::size_t>(k))[j] -
                         w.node(static_cast<std::size_t>(k - 1))[j];
      CHECK(inc == doctest::Approx(sqrt_dt * z[j]).epsilon(1e-15));
    }
  }
}

TEST_CASE("checked_pow guards overflow and limits") {
  CHECK(checked_pow(2, 10, 1'000'000) == 1024);
  CHECK(checked_pow(7, 0, 10) == 1);
  CHECK_THROWS_AS(checked_pow(10, 10, 1'000'000'000), std::overflow_error);
}

TEST_CASE("replication seeds are distinct") {
  std::set<std::uint64_t> s;
  for (std::uint64_t r = 0; r < 10'000; ++r) s.insert(replication_seed(MasterSeed{123}, r).value);
  CHECK(s.size() == 10'000);
}
