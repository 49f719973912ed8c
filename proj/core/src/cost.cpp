#include <mlpbsde/cost.hpp>

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <mlpbsde/pathgrid.hpp>

namespace mlpbsde {

namespace {

std::int64_t mul_checked(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("cost bound overflow");
  return r;
}

std::int64_t add_checked(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("cost bound overflow");
  return r;
}

std::int64_t pow_checked(std::int64_t base, int e) {
  std::int64_t p = 1;
  for (int i = 0; i < e; ++i) p = mul_checked(p, base);
  return p;
}

}  // namespace

std::int64_t cost_mlp_bound(int n, std::int64_t M, std::int64_t alpha) {
  if (n < 0 || M < 1 || alpha < 1) throw std::invalid_argument("cost_mlp_bound: bad arguments");
  std::vector<std::int64_t> c(static_cast<std::size_t>(n) + 1, 0);
  for (int k = 1; k <= n; ++k) {
    std::int64_t v = mul_checked(alpha, pow_checked(M, k));
    for (int l = 0; l < k; ++l) {
      std::int64_t inner = add_checked(1 + alpha, c[static_cast<std::size_t>(l)]);
      if (l >= 1) inner = add_checked(inner, c[static_cast<std::size_t>(l - 1)]);
      v = add_checked(v, mul_checked(pow_checked(M, k - l), inner));
    }
    c[static_cast<std::size_t>(k)] = v;
  }
  return c[static_cast<std::size_t>(n)];
}

std::int64_t cost_path_bound(int n, std::int64_t M, std::int64_t alpha) {
  if (n < 0 || M < 1 || alpha < 1) throw std::invalid_argument("cost_path_bound: bad arguments");
  std::int64_t v = mul_checked(alpha, add_checked(pow_checked(M, n), 1));
  for (int l = 0; l < n; ++l) {
    const std::int64_t nodes = add_checked(pow_checked(M, l + 1), 1);
    v = add_checked(v, mul_checked(nodes, cost_mlp_bound(n - l, M, alpha)));
  }
  return v;
}

std::int64_t cost_mlp_closed(int n, std::int64_t M, std::int64_t alpha) {
  return mul_checked(alpha, pow_checked(mul_checked(5, M), n));
}

std::int64_t cost_path_closed(int n, std::int64_t M, std::int64_t alpha) {
  return mul_checked(static_cast<std::int64_t>(n) + 2,
                     mul_checked(pow_checked(mul_checked(5, M), n + 1), alpha));
}

double err_bound_mlp(int N, std::int64_t M, double L, double T, double V_beta) {
  if (N < 0 || M < 1) throw std::invalid_argument("err_bound_mlp: bad arguments");
  return std::exp(0.5 * static_cast<double>(M)) *
         std::pow(static_cast<double>(M), -0.5 * N) *
         std::pow(50.0 * std::exp(2.0 * L * T), N + 1) * V_beta;
}

double err_bound_path(int n, std::int64_t M, double L, double T, double rho, double V0,
                      double z_fourth_moment) {
  if (n < 1 || M < 1) throw std::invalid_argument("err_bound_path: requires n >= 1, M >= 1");
  return 8.0 * n *
         std::exp(0.5 * static_cast<double>(M) + 4.0 * n * L * T + 0.5 * rho * T) *
         std::pow(static_cast<double>(M), -0.5 * n) * std::pow(50.0, 2.0 * n) *
         std::pow(V0 * std::max(z_fourth_moment, 1.0), 0.25);
}

double normal_fourth_moment(int d) {
  if (d < 1) throw std::invalid_argument("normal_fourth_moment: d must be >= 1");
  return static_cast<double>(d) * d + 2.0 * d;
}

std::string BoundReport::to_json() const {
  std::ostringstream out;
  char buf[64];
  out << "{\"alpha\": " << alpha
      << ", \"cost_mlp_exact\": " << cost_mlp_exact
      << ", \"cost_mlp_closed\": " << cost_mlp_closed
      << ", \"cost_path_exact\": " << cost_path_exact
      << ", \"cost_path_closed\": " << cost_path_closed;
  std::snprintf(buf, sizeof(buf), "%.17g", err_mlp);
  out << ", \"err_mlp\": " << buf;
  std::snprintf(buf, sizeof(buf), "%.17g", err_path);
  out << ", \"err_path\": " << buf << "}";
  return out.str();
}

BoundReport bound_report(const BsdeProblem& p, int n, std::int64_t M) {
  BoundReport r;
  r.alpha = p.dim_d + 3;
  r.cost_mlp_exact = cost_mlp_bound(n, M, r.alpha);
  r.cost_mlp_closed = cost_mlp_closed(n, M, r.alpha);
  r.cost_path_exact = cost_path_bound(n, M, r.alpha);
  r.cost_path_closed = cost_path_closed(n, M, r.alpha);
  const double L = p.driver.lipschitz_L;
  const double V_beta = std::pow(std::exp(p.rho * p.horizon_T) * p.lyapunov_V0, p.beta);
  r.err_mlp = err_bound_mlp(n, M, L, p.horizon_T, V_beta);
  r.err_path = (n >= 1) ? err_bound_path(n, M, L, p.horizon_T, p.rho, p.lyapunov_V0,
                                         normal_fourth_moment(p.dim_d))
                        : 0.0;
  return r;
}

double pilot_sup_rmse(const BsdeProblem& p, const ReferenceSolution& ref, int n,
                      std::int64_t M, int replications, MasterSeed base_seed) {
  if (replications < 1) throw std::invalid_argument("pilot_sup_rmse: R must be >= 1");
  double sumsq = 0.0;
  for (int r = 0; r < replications; ++r) {
    const PathEstimate est =
        path_estimate(p, replication_seed(base_seed, static_cast<std::uint64_t>(r)), n, M);
    const std::int64_t N = static_cast<std::int64_t>(est.fine_nodes.size()) - 1;
    double sup = 0.0;
    for (std::int64_t k = 0; k <= N; ++k) {
      const double tk = (static_cast<double>(k) * p.horizon_T) / static_cast<double>(N);
      const double* w = est.w_path.node(static_cast<std::size_t>(k));
      const double u = ref.evaluate(tk, std::span<const double>(w, static_cast<std::size_t>(p.dim_d)));
      sup = std::max(sup, std::abs(est.fine_nodes[static_cast<std::size_t>(k)] - u));
    }
    sumsq += sup * sup;
  }
  return std::sqrt(sumsq / replications);
}

int select_n(const BsdeProblem& p, const ReferenceSolution& ref, double epsilon,
             const PilotConfig& pilot) {
  if (!(epsilon > 0.0) || epsilon > 1e6)
    throw std::invalid_argument("select_n: epsilon must be positive");
  for (int n = 1; n <= pilot.max_n; ++n) {
    const double rmse = pilot_sup_rmse(p, ref, n, n, pilot.replications, pilot.seed);
    if (rmse < epsilon) return n;
  }
  throw std::runtime_error("select_n: resource guard n <= " + std::to_string(pilot.max_n) +
                           " exceeded before reaching epsilon");
}

}  // namespace mlpbsde
