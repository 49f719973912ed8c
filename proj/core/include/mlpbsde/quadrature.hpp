#pragma once

// Gaussian quadrature rules used by the reference oracles.

#include <functional>
#include <vector>

namespace mlpbsde {

struct QuadRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Nodes/weights for E[phi(Z)], Z standard normal: sum_i w_i phi(x_i).
// Derived from the n-point Gauss-Hermite rule; nodes with |x| > trunc are
// dropped (their weights are negligible at the tolerances used here).
QuadRule gauss_hermite_normal(int n, double trunc = 8.0);

// n-point Gauss-Legendre rule on [0, 1].
QuadRule gauss_legendre_unit(int n);

// E[phi(Z)] with the given rule.
double normal_expectation(const QuadRule& rule, const std::function<double(double)>& phi);

}  // namespace mlpbsde
