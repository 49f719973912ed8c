#include <mlpbsde/quadrature.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mlpbsde {

namespace {

// Orthonormal Hermite recurrence (weight e^{-x^2}); returns (p_n(x), p_{n-1}(x)).
// Stable for n up to several hundred.
std::pair<double, double> hermite_orthonormal(int n, double x) {
  const double pi14 = std::pow(std::numbers::pi, -0.25);
  double pm1 = 0.0;
  double p = pi14;  // p_0
  for (int k = 1; k <= n; ++k) {
    const double pk = x * std::sqrt(2.0 / k) * p - std::sqrt((k - 1.0) / k) * pm1;
    pm1 = p;
    p = pk;
  }
  return {p, pm1};
}

}  // namespace

QuadRule gauss_hermite_normal(int n, double trunc) {
  if (n < 1) throw std::invalid_argument("gauss_hermite_normal: n must be >= 1");
  // All positive roots lie in (0, sqrt(2n+1)) with spacing no finer than
  // roughly pi/sqrt(2n+1); a sign-change scan brackets each one, then
  // bisection plus a Newton polish pins it down.  This stays robust at
  // large n where chained asymptotic initial guesses collapse onto the
  // same root.
  std::vector<double> t(n), w(n);
  const double upper = std::sqrt(2.0 * n + 1.0);
  const double step = std::numbers::pi / (4.0 * upper);
  const bool odd = (n % 2) != 0;
  std::vector<double> roots;  // ascending positive roots
  double prev_x = odd ? 0.0 : step * 1e-3;
  double prev_p = hermite_orthonormal(n, prev_x).first;
  if (odd) {
    // x = 0 is itself a root; start the scan just above it.
    prev_x = step * 1e-3;
    prev_p = hermite_orthonormal(n, prev_x).first;
  }
  for (double xs = prev_x + step;
       roots.size() < static_cast<std::size_t>(n / 2) && xs < upper + 1.0; xs += step) {
    double ps = hermite_orthonormal(n, xs).first;
    if ((prev_p < 0.0) != (ps < 0.0)) {
      double lo = prev_x, hi = xs, plo = prev_p;
      for (int it = 0; it < 40; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double pm = hermite_orthonormal(n, mid).first;
        if ((plo < 0.0) != (pm < 0.0)) {
          hi = mid;
        } else {
          lo = mid;
          plo = pm;
        }
      }
      double x = 0.5 * (lo + hi);
      for (int it = 0; it < 8; ++it) {
        auto [p, pm1] = hermite_orthonormal(n, x);
        const double dp = std::sqrt(2.0 * n) * pm1;  // derivative of orthonormal H_n
        const double dx = p / dp;
        const double xn = x - dx;
        if (xn < lo - step || xn > hi + step) break;  // keep the bracket
        x = xn;
        if (std::abs(dx) < 1e-15 * (1.0 + std::abs(x))) break;
      }
      roots.push_back(x);
    }
    prev_x = xs;
    prev_p = ps;
  }
  if (roots.size() != static_cast<std::size_t>(n / 2))
    throw std::runtime_error("gauss_hermite_normal: root scan failed");
  if (odd) roots.insert(roots.begin(), 0.0);
  // roots holds the (n+1)/2 nonnegative roots in ascending order.
  for (std::size_t i = 0; i < roots.size(); ++i) {
    const double x = roots[roots.size() - 1 - i];  // descending
    const double pm1 = hermite_orthonormal(n, x).second;
    const double dp = std::sqrt(2.0 * n) * pm1;
    const std::size_t hi_idx = static_cast<std::size_t>(n) - 1 - i;
    t[hi_idx] = x;
    t[i] = -x;
    w[hi_idx] = 2.0 / (dp * dp);
    w[i] = w[hi_idx];
  }
  // Convert to the standard-normal measure: z = sqrt(2) t, weight w / sqrt(pi).
  QuadRule rule;
  for (int i = 0; i < n; ++i) {
    const double z = std::numbers::sqrt2 * t[i];
    if (std::abs(z) > trunc) continue;
    rule.nodes.push_back(z);
    rule.weights.push_back(w[i] / std::sqrt(std::numbers::pi));
  }
  return rule;
}

QuadRule gauss_legendre_unit(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre_unit: n must be >= 1");
  QuadRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double wi = 2.0 / ((1.0 - x * x) * dp * dp);
    // Map [-1,1] -> [0,1].
    rule.nodes[i] = 0.5 * (1.0 - x);
    rule.nodes[n - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[i] = 0.5 * wi;
    rule.weights[n - 1 - i] = 0.5 * wi;
  }
  return rule;
}

double normal_expectation(const QuadRule& rule, const std::function<double(double)>& phi) {
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * phi(rule.nodes[i]);
  return s;
}

}  // namespace mlpbsde
