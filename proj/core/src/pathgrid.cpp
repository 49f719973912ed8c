#include <mlpbsde/pathgrid.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace mlpbsde {

namespace {

inline double grid_node(std::int64_t k, std::int64_t M, double T) {
  // The endpoint is pinned to T so the node set contains T exactly even when
  // (M*T)/M rounds away from it.
  if (k == M) return T;
  return (static_cast<double>(k) * T) / static_cast<double>(M);
}

void require_time(double t, double T) {
  if (t < 0.0 || t > T) throw std::invalid_argument("time outside [0,T]");
}

// Largest k in [0, kmax] with node(k) <= t.
std::int64_t locate(double t, std::int64_t M, double T, std::int64_t kmax) {
  std::int64_t k = static_cast<std::int64_t>(std::floor(t / T * static_cast<double>(M)));
  k = std::clamp<std::int64_t>(k, 0, kmax);
  while (k > 0 && grid_node(k, M, T) > t) --k;
  while (k < kmax && grid_node(k + 1, M, T) <= t) ++k;
  return k;
}

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::int64_t GridSpec::num_steps() const { return checked_pow(M, level, 100'000'000); }

double GridSpec::node(std::int64_t k) const {
  return grid_node(k, num_steps(), T);
}

double floor_grid(double t, std::int64_t M, double T) {
  require_time(t, T);
  // T itself is excluded from the candidate set.
  return grid_node(locate(t, M, T, M - 1), M, T);
}

double ceil_grid(double t, std::int64_t M, double T) {
  require_time(t, T);
  const double end = grid_node(M, M, T);
  if (t >= end) return end;
  std::int64_t k = locate(t, M, T, M) + 1;
  while (k < M && grid_node(k, M, T) <= t) ++k;
  return grid_node(std::min(k, M), M, T);
}

double interpolate(const std::vector<double>& nodes, const GridSpec& grid, double t) {
  const std::int64_t m = grid.num_steps();
  if (static_cast<std::int64_t>(nodes.size()) != m + 1)
    throw std::invalid_argument("interpolate: node count does not match grid");
  require_time(t, grid.T);
  const std::int64_t k = locate(t, m, grid.T, m - 1);
  const double left = grid_node(k, m, grid.T);
  const double right = grid_node(k + 1, m, grid.T);
  if (t == left) return nodes[static_cast<std::size_t>(k)];
  if (t == right) return nodes[static_cast<std::size_t>(k + 1)];
  const double h = right - left;
  return ((right - t) * nodes[static_cast<std::size_t>(k)] +
          (t - left) * nodes[static_cast<std::size_t>(k + 1)]) / h;
}

PathEstimate path_estimate(const BsdeProblem& p, MasterSeed seed, int n, std::int64_t M) {
  if (n < 1) throw std::invalid_argument("path_estimate: n must be >= 1");
  check_guards(MlpConfig{n, M});
  const double T = p.horizon_T;
  const int d = p.dim_d;
  const std::int64_t N = checked_pow(M, n, 100'000'000);

  PathEstimate est{std::vector<double>(static_cast<std::size_t>(N) + 1, 0.0),
                   brownian_path(seed, d, M, n, T), n, M, T, d, CostCounters{}, seed};
  est.counters.rv_scalars += static_cast<std::uint64_t>(d) * static_cast<std::uint64_t>(N);

  std::vector<double> vals;
  for (int l = 0; l < n; ++l) {
    const std::int64_t fine_steps = checked_pow(M, l + 1, N);
    const std::int64_t stride = N / fine_steps;  // M^(n-l-1)
    const MlpField field(p, seed, ThetaPath({l}), MlpConfig{n - l, M});

    // Field values at the level-(l+1) grid nodes; level-l nodes are the
    // subset at indices j*M of the same array (nested grids, same field,
    // same (t, W_t) points).
    vals.assign(static_cast<std::size_t>(fine_steps) + 1, 0.0);
    for (std::int64_t j = 0; j <= fine_steps; ++j) {
      const double tj = grid_node(j, fine_steps, T);
      const double* wj = est.w_path.node(static_cast<std::size_t>(j * stride));
      vals[static_cast<std::size_t>(j)] =
          field(tj, std::span<const double>(wj, static_cast<std::size_t>(d)), est.counters);
    }

    auto add_interp = [&](std::int64_t steps, std::int64_t vals_stride, double sign) {
      const std::int64_t seg = N / steps;  // finest indices per segment
      for (std::int64_t k = 0; k <= N; ++k) {
        const std::int64_t j = k / seg;
        const std::int64_t rem = k % seg;
        double v;
        if (rem == 0) {
          v = vals[static_cast<std::size_t>(j * vals_stride)];
        } else {
          const double lambda = static_cast<double>(rem) / static_cast<double>(seg);
          v = (1.0 - lambda) * vals[static_cast<std::size_t>(j * vals_stride)] +
              lambda * vals[static_cast<std::size_t>((j + 1) * vals_stride)];
        }
        est.fine_nodes[static_cast<std::size_t>(k)] += sign * v;
      }
    };

    add_interp(fine_steps, 1, 1.0);
    if (l >= 1) add_interp(fine_steps / M, M, -1.0);
  }
  return est;
}

double path_value(const PathEstimate& est, double t) {
  return interpolate(est.fine_nodes, GridSpec{est.M, est.n, est.T}, t);
}

std::string path_to_csv(const PathEstimate& est) {
  std::ostringstream out;
  out << "k,t_k";
  for (int j = 1; j <= est.d; ++j) out << ",W_" << j;
  out << ",Y_k\n";
  const std::int64_t N = static_cast<std::int64_t>(est.fine_nodes.size()) - 1;
  for (std::int64_t k = 0; k <= N; ++k) {
    out << k << ',' << fmt17(grid_node(k, N, est.T));
    const double* w = est.w_path.node(static_cast<std::size_t>(k));
    for (int j = 0; j < est.d; ++j) out << ',' << fmt17(w[j]);
    out << ',' << fmt17(est.fine_nodes[static_cast<std::size_t>(k)]) << '\n';
  }
  return out.str();
}

std::string path_to_json(const PathEstimate& est) {
  std::ostringstream out;
  out << "{\"n\": " << est.n << ", \"M\": " << est.M << ", \"T\": " << fmt17(est.T)
      << ", \"d\": " << est.d << ", \"seed\": " << est.seed.value
      << ", \"counters\": " << est.counters.to_json() << "}";
  return out.str();
}

bool check_interp_error_bound(const InterpCase& c) {
  if (c.partition.size() < 2) throw std::invalid_argument("empty partition");
  const double T = c.partition.back();
  const int S = std::max(c.dense_samples, 1000);
  const double h = T / (S - 1);

  std::vector<double> fs(static_cast<std::size_t>(S));
  for (int i = 0; i < S; ++i) fs[static_cast<std::size_t>(i)] = c.f(i * h);
  std::vector<double> fn;
  fn.reserve(c.partition.size());
  for (double tau : c.partition) fn.push_back(c.f(tau));

  // |r-s|^alpha on the uniform dense mesh depends only on the index gap.
  std::vector<double> gap_pow(static_cast<std::size_t>(S));
  for (int g = 1; g < S; ++g) gap_pow[static_cast<std::size_t>(g)] = std::pow(g * h, c.alpha);

  double seminorm = 0.0;
  for (int i = 0; i < S; ++i)
    for (int j = i + 1; j < S; ++j)
      seminorm = std::max(seminorm,
                          std::abs(fs[static_cast<std::size_t>(i)] - fs[static_cast<std::size_t>(j)]) /
                              gap_pow[static_cast<std::size_t>(j - i)]);

  double lhs = 0.0;
  double max_step = 0.0;
  std::size_t seg = 1;
  for (int i = 0; i < S; ++i) {
    const double t = i * h;
    while (seg + 1 < c.partition.size() && c.partition[seg] < t) ++seg;
    const double a = c.partition[seg - 1], b = c.partition[seg];
    const double x = (b - a > 0) ? ((b - t) * fn[seg - 1] + (t - a) * fn[seg]) / (b - a) : fn[seg];
    lhs = std::max(lhs, std::abs(x - fs[static_cast<std::size_t>(i)]));
  }
  for (std::size_t k = 1; k < c.partition.size(); ++k)
    max_step = std::max(max_step, c.partition[k] - c.partition[k - 1]);

  const double rhs = std::pow(2.0, -std::min(3.0, c.alpha)) * std::pow(max_step, c.alpha) * seminorm;
  return lhs <= rhs + 1e-10;
}

bool check_interp_holder(const InterpCase& c) {
  if (c.partition.size() < 2) throw std::invalid_argument("empty partition");
  const double T = c.partition.back();
  const int S = std::max(c.dense_samples, 1000);
  const double h = T / (S - 1);

  std::vector<double> fs(static_cast<std::size_t>(S)), xs(static_cast<std::size_t>(S));
  std::vector<double> fn;
  fn.reserve(c.partition.size());
  for (double tau : c.partition) fn.push_back(c.f(tau));
  std::size_t seg = 1;
  for (int i = 0; i < S; ++i) {
    const double t = i * h;
    fs[static_cast<std::size_t>(i)] = c.f(t);
    while (seg + 1 < c.partition.size() && c.partition[seg] < t) ++seg;
    const double a = c.partition[seg - 1], b = c.partition[seg];
    xs[static_cast<std::size_t>(i)] =
        (b - a > 0) ? ((b - t) * fn[seg - 1] + (t - a) * fn[seg]) / (b - a) : fn[seg];
  }

  std::vector<double> gap_pow(static_cast<std::size_t>(S));
  for (int g = 1; g < S; ++g) gap_pow[static_cast<std::size_t>(g)] = std::pow(g * h, c.alpha);

  double sem_f = 0.0, sem_x = 0.0;
  for (int i = 0; i < S; ++i) {
    for (int j = i + 1; j < S; ++j) {
      const double gp = gap_pow[static_cast<std::size_t>(j - i)];
      sem_f = std::max(sem_f, std::abs(fs[static_cast<std::size_t>(i)] - fs[static_cast<std::size_t>(j)]) / gp);
      sem_x = std::max(sem_x, std::abs(xs[static_cast<std::size_t>(i)] - xs[static_cast<std::size_t>(j)]) / gp);
    }
  }
  return sem_x <= sem_f + 1e-10;
}

}  // namespace mlpbsde
