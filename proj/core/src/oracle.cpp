#include <mlpbsde/oracle.hpp>

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <stdexcept>
#include <vector>

#include <mlpbsde/quadrature.hpp>

namespace mlpbsde {

ReferenceSolution affine_closed_form(const BsdeProblem& p) {
  if (!p.driver.affine)
    throw std::invalid_argument("affine_closed_form: driver is not affine");
  if (!p.terminal.gaussian_smoothing)
    throw std::invalid_argument("affine_closed_form: terminal has no gaussian smoothing");
  const double a = p.driver.affine->a;
  const double b = p.driver.affine->b;
  const double T = p.horizon_T;
  auto smoothing = p.terminal.gaussian_smoothing;

  ReferenceSolution ref;
  ref.kind = OracleKind::affine_closed_form;
  ref.accuracy = 1e-12;
  ref.evaluate = [a, b, T, smoothing](double t, std::span<const double> x) {
    const double rem = T - t;
    const double G = smoothing(rem, x);
    if (a == 0.0) return G + b * rem;
    const double ea = std::exp(a * rem);
    return ea * G + (b / a) * (ea - 1.0);
  };
  return ref;
}

namespace {

struct TensorGrid {
  int nt = 0, ns = 0;
  double T = 1.0, x0 = 0.0, hx = 0.0, ht = 0.0;
  std::vector<std::vector<double>> u;    // [time][space]
  std::vector<std::vector<double>> ypp;  // spline second derivatives per time row

  void build_splines() {
    const int n = ns;
    std::vector<double> diag(static_cast<std::size_t>(n)), rhs(static_cast<std::size_t>(n));
    for (int j = 0; j < nt; ++j) {
      auto& row = u[static_cast<std::size_t>(j)];
      auto& y2 = ypp[static_cast<std::size_t>(j)];
      // Natural cubic spline on a uniform grid (Thomas algorithm).
      y2.assign(static_cast<std::size_t>(n), 0.0);
      if (n < 3) continue;
      diag[1] = 4.0;
      rhs[1] = 6.0 * (row[2] - 2.0 * row[1] + row[0]) / (hx * hx);
      for (int i = 2; i < n - 1; ++i) {
        const double m = 1.0 / diag[static_cast<std::size_t>(i - 1)];
        diag[static_cast<std::size_t>(i)] = 4.0 - m;
        rhs[static_cast<std::size_t>(i)] =
            6.0 * (row[static_cast<std::size_t>(i + 1)] - 2.0 * row[static_cast<std::size_t>(i)] +
                   row[static_cast<std::size_t>(i - 1)]) / (hx * hx) -
            m * rhs[static_cast<std::size_t>(i - 1)];
      }
      for (int i = n - 2; i >= 1; --i) {
        y2[static_cast<std::size_t>(i)] =
            (rhs[static_cast<std::size_t>(i)] -
             y2[static_cast<std::size_t>(i + 1)]) / diag[static_cast<std::size_t>(i)];
      }
    }
  }

  [[nodiscard]] double row_at(int j, double y) const {
    const auto& row = u[static_cast<std::size_t>(j)];
    const auto& y2 = ypp[static_cast<std::size_t>(j)];
    double yy = std::clamp(y, x0, x0 + hx * (ns - 1));
    int i = static_cast<int>(std::floor((yy - x0) / hx));
    i = std::clamp(i, 0, ns - 2);
    const double xa = x0 + hx * i;
    const double A = (xa + hx - yy) / hx;
    const double B = 1.0 - A;
    return A * row[static_cast<std::size_t>(i)] + B * row[static_cast<std::size_t>(i + 1)] +
           ((A * A * A - A) * y2[static_cast<std::size_t>(i)] +
            (B * B * B - B) * y2[static_cast<std::size_t>(i + 1)]) * (hx * hx) / 6.0;
  }

  // Collapses the cubic Lagrange time interpolation at a fixed s into one
  // combined spline row (value and second-derivative coefficients are both
  // linear in the rows, so the combination is itself a valid spline row).
  void combine_rows(double s, std::vector<double>& uc, std::vector<double>& yc) const {
    uc.assign(static_cast<std::size_t>(ns), 0.0);
    yc.assign(static_cast<std::size_t>(ns), 0.0);
    int j0;
    double wts[4];
    int nw;
    if (nt < 4) {
      j0 = std::clamp(static_cast<int>(std::floor(s / ht)), 0, nt - 2);
      const double lam = (s - ht * j0) / ht;
      wts[0] = 1.0 - lam;
      wts[1] = lam;
      nw = 2;
    } else {
      j0 = std::clamp(static_cast<int>(std::floor(s / ht)) - 1, 0, nt - 4);
      nw = 4;
      for (int a = 0; a < 4; ++a) {
        double w = 1.0;
        const double ta = ht * (j0 + a);
        for (int b = 0; b < 4; ++b) {
          if (b == a) continue;
          w *= (s - ht * (j0 + b)) / (ta - ht * (j0 + b));
        }
        wts[a] = w;
      }
    }
    for (int a = 0; a < nw; ++a) {
      const auto& row = u[static_cast<std::size_t>(j0 + a)];
      const auto& y2 = ypp[static_cast<std::size_t>(j0 + a)];
      for (int k = 0; k < ns; ++k) {
        uc[static_cast<std::size_t>(k)] += wts[a] * row[static_cast<std::size_t>(k)];
        yc[static_cast<std::size_t>(k)] += wts[a] * y2[static_cast<std::size_t>(k)];
      }
    }
  }

  [[nodiscard]] double eval_row(const std::vector<double>& uc, const std::vector<double>& yc,
                                double y) const {
    double yy = std::clamp(y, x0, x0 + hx * (ns - 1));
    int i = static_cast<int>(std::floor((yy - x0) / hx));
    i = std::clamp(i, 0, ns - 2);
    const double xa = x0 + hx * i;
    const double A = (xa + hx - yy) / hx;
    const double B = 1.0 - A;
    return A * uc[static_cast<std::size_t>(i)] + B * uc[static_cast<std::size_t>(i + 1)] +
           ((A * A * A - A) * yc[static_cast<std::size_t>(i)] +
            (B * B * B - B) * yc[static_cast<std::size_t>(i + 1)]) * (hx * hx) / 6.0;
  }

  // Cubic Lagrange in time over four consecutive rows, spline in space.
  [[nodiscard]] double at(double s, double y) const {
    if (nt < 4) {
      // linear in t fallback
      int j = std::clamp(static_cast<int>(std::floor(s / ht)), 0, nt - 2);
      const double lam = (s - ht * j) / ht;
      return (1.0 - lam) * row_at(j, y) + lam * row_at(j + 1, y);
    }
    int j0 = static_cast<int>(std::floor(s / ht)) - 1;
    j0 = std::clamp(j0, 0, nt - 4);
    double value = 0.0;
    for (int a = 0; a < 4; ++a) {
      double w = 1.0;
      const double ta = ht * (j0 + a);
      for (int b = 0; b < 4; ++b) {
        if (b == a) continue;
        const double tb = ht * (j0 + b);
        w *= (s - tb) / (ta - tb);
      }
      value += w * row_at(j0 + a, y);
    }
    return value;
  }
};

}  // namespace

ReferenceSolution picard_quadrature(const BsdeProblem& p, const PicardQuadratureOptions& opts) {
  if (p.dim_d != 1) throw std::invalid_argument("picard_quadrature: requires d = 1");
  const double T = p.horizon_T;
  const double LT = p.driver.lipschitz_L * T;
  if (LT >= 1.0) throw std::invalid_argument("picard_quadrature: L*T >= 1, contraction not guaranteed");

  const QuadRule gh = gauss_hermite_normal(opts.gh_nodes, 8.0);
  const QuadRule gl = gauss_legendre_unit(opts.gl_nodes);

  auto grid = std::make_shared<TensorGrid>();
  grid->nt = opts.time_nodes;
  grid->ns = opts.space_grid;
  grid->T = T;
  grid->x0 = -opts.space_radius;
  grid->hx = 2.0 * opts.space_radius / (opts.space_grid - 1);
  grid->ht = T / (opts.time_nodes - 1);
  grid->u.assign(static_cast<std::size_t>(grid->nt),
                 std::vector<double>(static_cast<std::size_t>(grid->ns), 0.0));
  grid->ypp.assign(static_cast<std::size_t>(grid->nt),
                   std::vector<double>(static_cast<std::size_t>(grid->ns), 0.0));

  // E[g(x + sqrt(rem) Z)] per grid point, fixed across iterations.
  std::vector<std::vector<double>> base(grid->u.size());
  for (int j = 0; j < grid->nt; ++j) {
    const double rem = T - grid->ht * j;
    auto& row = base[static_cast<std::size_t>(j)];
    row.resize(static_cast<std::size_t>(grid->ns));
    for (int k = 0; k < grid->ns; ++k) {
      const double xk = grid->x0 + grid->hx * k;
      const double xv[1] = {xk};
      if (p.terminal.gaussian_smoothing) {
        row[static_cast<std::size_t>(k)] = p.terminal.gaussian_smoothing(rem, xv);
      } else {
        const double srem = std::sqrt(rem);
        row[static_cast<std::size_t>(k)] = normal_expectation(gh, [&](double z) {
          const double xz[1] = {xk + srem * z};
          return p.terminal.evaluate(xz);
        });
      }
    }
  }

  double last_inc = 0.0;
  std::vector<std::vector<double>> next = grid->u;
  std::vector<double> integral(static_cast<std::size_t>(grid->ns));
  std::vector<double> uc, yc;
  for (int it = 0; it < opts.iters; ++it) {
    grid->build_splines();
    last_inc = 0.0;
    for (int j = 0; j < grid->nt; ++j) {
      const double tj = grid->ht * j;
      const double rem = T - tj;
      const double srem = std::sqrt(rem);
      // Time integral with s = t + rem*lambda^2 so the sqrt(s - t) spatial
      // shift is smooth in the integration variable; s is shared across the
      // whole space row, so the time interpolation collapses once per node.
      std::fill(integral.begin(), integral.end(), 0.0);
      for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
        const double lam = gl.nodes[q];
        const double s = tj + rem * lam * lam;
        const double sigma = srem * lam;
        grid->combine_rows(s, uc, yc);
        const double wq = gl.weights[q] * lam;
        for (int k = 0; k < grid->ns; ++k) {
          const double xk = grid->x0 + grid->hx * k;
          double inner = 0.0;
          for (std::size_t m = 0; m < gh.nodes.size(); ++m) {
            const double y = xk + sigma * gh.nodes[m];
            const double xv[1] = {y};
            inner += gh.weights[m] * p.driver.evaluate(s, xv, grid->eval_row(uc, yc, y));
          }
          integral[static_cast<std::size_t>(k)] += wq * inner;
        }
      }
      for (int k = 0; k < grid->ns; ++k) {
        const double v = base[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] +
                         2.0 * rem * integral[static_cast<std::size_t>(k)];
        last_inc = std::max(last_inc,
                            std::abs(v - grid->u[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)]));
        next[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] = v;
      }
    }
    grid->u.swap(next);
    if (last_inc < opts.tol) break;
  }
  grid->build_splines();

  ReferenceSolution ref;
  ref.kind = OracleKind::picard_quadrature;
  ref.accuracy = (LT < 1.0) ? last_inc / (1.0 - LT) : last_inc;
  ref.evaluate = [grid](double t, std::span<const double> x) { return grid->at(t, x[0]); };
  return ref;
}

double sfpe_residual(const BsdeProblem& p, const ReferenceSolution& ref, double t, double x) {
  if (p.dim_d != 1) throw std::invalid_argument("sfpe_residual: requires d = 1");
  const double T = p.horizon_T;
  const double rem = T - t;
  const double srem = std::sqrt(rem);
  const QuadRule gh = gauss_hermite_normal(200, 8.0);
  const QuadRule gl = gauss_legendre_unit(32);

  const double xv[1] = {x};
  double phi;
  if (p.terminal.gaussian_smoothing) {
    phi = p.terminal.gaussian_smoothing(rem, xv);
  } else {
    phi = normal_expectation(gh, [&](double z) {
      const double xz[1] = {x + srem * z};
      return p.terminal.evaluate(xz);
    });
  }
  double integral = 0.0;
  for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
    const double lam = gl.nodes[q];
    const double s = t + rem * lam * lam;
    const double sigma = srem * lam;
    double inner = 0.0;
    for (std::size_t m = 0; m < gh.nodes.size(); ++m) {
      const double y = x + sigma * gh.nodes[m];
      const double yv[1] = {y};
      inner += gh.weights[m] * p.driver.evaluate(s, yv, ref.evaluate(s, yv));
    }
    integral += gl.weights[q] * lam * inner;
  }
  phi += 2.0 * rem * integral;
  return phi - ref.at(t, x);
}

namespace {

double nested_mc_rec(const BsdeProblem& p, double t, std::span<const double> x, int depth,
                     std::int64_t samples, std::mt19937_64& rng) {
  const double T = p.horizon_T;
  if (depth == 0) {
    // Base iterate: one-sample estimate of the terminal smoothing E[g(x + W_{T-t})].
    std::normal_distribution<double> normal(0.0, 1.0);
    const double srem0 = std::sqrt(T - t);
    std::vector<double> y0(x.begin(), x.end());
    for (auto& yj : y0) yj += srem0 * normal(rng);
    return p.terminal.evaluate(y0);
  }
  const double rem = T - t;
  const int d = p.dim_d;
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> y(static_cast<std::size_t>(d));
  const double srem = std::sqrt(rem);
  double sum = 0.0;
  for (std::int64_t i = 0; i < samples; ++i) {
    for (int j = 0; j < d; ++j)
      y[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(j)] + srem * normal(rng);
    double v = p.terminal.evaluate(y);
    if (rem > 0.0) {
      const double r = unif(rng);
      const double tau = t + rem * r;
      const double sig = std::sqrt(rem * r);
      for (int j = 0; j < d; ++j)
        y[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(j)] + sig * normal(rng);
      const double u_prev = nested_mc_rec(p, tau, y, depth - 1, samples, rng);
      v += rem * p.driver.evaluate(tau, y, u_prev);
    }
    sum += v;
  }
  return sum / static_cast<double>(samples);
}

}  // namespace

NestedMcResult nested_mc(const BsdeProblem& p, double t, std::span<const double> x, int depth,
                         std::int64_t samples_per_level, std::uint64_t mc_seed) {
  if (depth < 1 || depth > 2) throw std::invalid_argument("nested_mc: depth must be 1 or 2");
  if (samples_per_level < 1) throw std::invalid_argument("nested_mc: samples must be >= 1");
  double work = 1.0;
  for (int l = 0; l < depth; ++l) work *= static_cast<double>(samples_per_level);
  if (work > 1e8) throw std::overflow_error("nested_mc: samples^depth exceeds resource guard");

  std::mt19937_64 rng(mc_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double T = p.horizon_T;
  const double rem = T - t;
  const double srem = std::sqrt(rem);
  const int d = p.dim_d;
  std::vector<double> y(static_cast<std::size_t>(d));

  double sum = 0.0, sumsq = 0.0;
  for (std::int64_t i = 0; i < samples_per_level; ++i) {
    for (int j = 0; j < d; ++j)
      y[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(j)] + srem * normal(rng);
    double v = p.terminal.evaluate(y);
    if (rem > 0.0) {
      const double r = unif(rng);
      const double tau = t + rem * r;
      const double sig = std::sqrt(rem * r);
      for (int j = 0; j < d; ++j)
        y[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(j)] + sig * normal(rng);
      const double u_prev = nested_mc_rec(p, tau, y, depth - 1, samples_per_level, rng);
      v += rem * p.driver.evaluate(tau, y, u_prev);
    }
    sum += v;
    sumsq += v * v;
  }
  const double mean = sum / static_cast<double>(samples_per_level);
  const double var = std::max(0.0, sumsq / static_cast<double>(samples_per_level) - mean * mean);
  return {mean, std::sqrt(var / static_cast<double>(samples_per_level))};
}

GapCheck lipschitz_gap_check(const std::function<double(double)>& f, double B1, double B2,
                             double v1, double v2, double w1, double w2) {
  GapCheck g;
  g.lhs = std::abs((f(v1) - f(w1)) - (f(v2) - f(w2)));
  g.rhs = B1 * std::abs((v1 - w1) - (v2 - w2)) +
          0.5 * B2 * (std::abs(v1 - w1) + std::abs(v2 - w2)) *
              std::min(std::abs(v1 - v2), std::abs(w1 - w2));
  g.holds = g.lhs <= g.rhs + 1e-12;
  return g;
}

}  // namespace mlpbsde
