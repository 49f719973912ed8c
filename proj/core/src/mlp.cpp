#include <mlpbsde/mlp.hpp>

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <vector>

namespace mlpbsde {

void check_guards(const MlpConfig& cfg) {
  if (cfg.n < 0 || cfg.n > 8) throw std::invalid_argument("MlpConfig: n must lie in [0, 8]");
  if (cfg.M < 1) throw std::invalid_argument("MlpConfig: M must be >= 1");
  checked_pow(5 * cfg.M, cfg.n, 1'000'000'000);  // (5M)^n <= 1e9
}

std::string CostCounters::to_json() const {
  char buf[192];
  std::snprintf(buf, sizeof(buf),
                "{\"rv_scalars\": %llu, \"f_evals\": %llu, \"g_evals\": %llu, \"total\": %llu}",
                static_cast<unsigned long long>(rv_scalars),
                static_cast<unsigned long long>(f_evals),
                static_cast<unsigned long long>(g_evals),
                static_cast<unsigned long long>(total()));
  return buf;
}

namespace {

constexpr std::int64_t kKahanThreshold = 10'000;

double evaluate_recursive(const BsdeProblem& p, MasterSeed seed, const ThetaPath& theta,
                          int n, std::int64_t M, double t, std::span<const double> x,
                          CostCounters& counters) {
  if (n == 0) return 0.0;

  const double T = p.horizon_T;
  const int d = p.dim_d;
  const std::int64_t mn = checked_pow(M, n, 1'000'000'000);

  // Terminal-condition leaf average (1/M^n) sum_i g(x + sqrt(T-t) z^{(theta,0,-i)}).
  const double sqrt_rem = std::sqrt(T - t);
  std::vector<double> z(static_cast<std::size_t>(d));
  std::vector<double> xs(static_cast<std::size_t>(d));
  double leaf_sum = 0.0;
  double comp = 0.0;
  const bool kahan = mn > kKahanThreshold;
  for (std::int64_t i = 1; i <= mn; ++i) {
    normal_draws(seed, theta.child(0, -i), d, z.data());
    counters.rv_scalars += static_cast<std::uint64_t>(d);
    for (int j = 0; j < d; ++j) xs[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(j)] + sqrt_rem * z[static_cast<std::size_t>(j)];
    const double gi = p.terminal.evaluate(xs);
    counters.g_evals += 1;
    if (kahan) {
      const double y = gi - comp;
      const double s = leaf_sum + y;
      comp = (s - leaf_sum) - y;
      leaf_sum = s;
    } else {
      leaf_sum += gi;
    }
  }
  double result = leaf_sum / static_cast<double>(mn);

  // Telescoped Picard correction levels.
  for (int l = 0; l < n; ++l) {
    const std::int64_t m = checked_pow(M, n - l, 1'000'000'000);
    double level_sum = 0.0;
    for (std::int64_t i = 1; i <= m; ++i) {
      const ThetaPath th = theta.child(l, i);
      const NodeDraws nd = node_draws(seed, th, d);
      counters.rv_scalars += 1 + static_cast<std::uint64_t>(d);
      const double tau = t + (T - t) * nd.r;
      const double shift = std::sqrt((T - t) * nd.r);
      for (int j = 0; j < d; ++j) xs[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(j)] + shift * nd.z[static_cast<std::size_t>(j)];

      const double u_fine = evaluate_recursive(p, seed, th, l, M, tau, xs, counters);
      double term = p.driver.evaluate(tau, xs, u_fine);
      counters.f_evals += 1;
      if (l >= 1) {
        const double u_coarse =
            evaluate_recursive(p, seed, theta.child(-l, i), l - 1, M, tau, xs, counters);
        term -= p.driver.evaluate(tau, xs, u_coarse);
        counters.f_evals += 1;
      }
      level_sum += term;
    }
    result += (T - t) / static_cast<double>(m) * level_sum;
  }
  return result;
}

}  // namespace

double mlp_evaluate(const BsdeProblem& p, MasterSeed seed, const ThetaPath& theta,
                    const MlpConfig& cfg, double t, std::span<const double> x,
                    CostCounters& counters) {
  check_guards(cfg);
  if (t < 0.0 || t > p.horizon_T) throw std::invalid_argument("mlp_evaluate: t outside [0,T]");
  if (static_cast<int>(x.size()) != p.dim_d)
    throw std::invalid_argument("mlp_evaluate: x dimension mismatch");
  return evaluate_recursive(p, seed, theta, cfg.n, cfg.M, t, x, counters);
}

MeanStderr mlp_expectation_check(const BsdeProblem& p, MasterSeed base_seed,
                                 std::int64_t M, double t, double x, int replications) {
  if (p.dim_d != 1) throw std::invalid_argument("mlp_expectation_check: requires d = 1");
  if (replications < 2) throw std::invalid_argument("mlp_expectation_check: R must be >= 2");
  const MlpConfig cfg{1, M};
  const double xv[1] = {x};
  double sum = 0.0, sumsq = 0.0;
  CostCounters counters;
  for (int r = 0; r < replications; ++r) {
    const double v = mlp_evaluate(p, replication_seed(base_seed, static_cast<std::uint64_t>(r)),
                                  ThetaPath{}, cfg, t, xv, counters);
    sum += v;
    sumsq += v * v;
  }
  const double mean = sum / replications;
  const double var = std::max(0.0, sumsq / replications - mean * mean);
  return {mean, std::sqrt(var / replications)};
}

}  // namespace mlpbsde
