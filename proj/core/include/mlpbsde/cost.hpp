#pragma once

// Analytic cost recursions and closed forms plus the error-bound formulas
// and the accuracy-driven level selector.

#include <cstdint>
#include <string>

#include <mlpbsde/oracle.hpp>
#include <mlpbsde/problem.hpp>
#include <mlpbsde/randomness.hpp>

namespace mlpbsde {

// Cost recursion for one field evaluation, taken with equality:
//   C(n) = alpha M^n 1{n>=1} + sum_{l=0}^{n-1} M^(n-l) (1 + alpha + C(l) + C(l-1) 1{l>=1}).
// Closed-form majorant: alpha (5M)^n.
std::int64_t cost_mlp_bound(int n, std::int64_t M, std::int64_t alpha);

// Cost recursion for one path realization, taken with equality:
//   F(n) = alpha (M^n + 1) + sum_{l=0}^{n-1} (M^(l+1) + 1) C(n-l).
// Closed-form majorant: (n+2) (5M)^(n+1) alpha.
std::int64_t cost_path_bound(int n, std::int64_t M, std::int64_t alpha);

std::int64_t cost_mlp_closed(int n, std::int64_t M, std::int64_t alpha);
std::int64_t cost_path_closed(int n, std::int64_t M, std::int64_t alpha);

// Pointwise L^2 error bound for U_{N,M}, scaled by the Lyapunov factor
// V_beta = (e^{rho(T-t)} V(x))^beta supplied by the caller:
//   e^{M/2} M^{-N/2} (50 e^{2LT})^{N+1} * V_beta.
double err_bound_mlp(int N, std::int64_t M, double L, double T, double V_beta);

// Sup-t L^2 error bound for the path estimator, n >= 1:
//   8 n e^{M/2 + 4nLT + rho T/2} M^{-n/2} 50^{2n} * (V0 max{E||z||^4, 1})^{1/4}.
double err_bound_path(int n, std::int64_t M, double L, double T, double rho, double V0,
                      double z_fourth_moment);

// E||Z||^4 for a d-dimensional standard normal (Euclidean norm): d^2 + 2d.
double normal_fourth_moment(int d);

struct BoundReport {
  std::int64_t cost_mlp_exact = 0;
  std::int64_t cost_mlp_closed = 0;
  std::int64_t cost_path_exact = 0;
  std::int64_t cost_path_closed = 0;
  double err_mlp = 0.0;
  double err_path = 0.0;
  std::int64_t alpha = 0;

  [[nodiscard]] std::string to_json() const;
};

// Bounds evaluated for one problem/config; alpha convention: d + 3.
BoundReport bound_report(const BsdeProblem& p, int n, std::int64_t M);

struct PilotConfig {
  int replications = 20;
  MasterSeed seed{1};
  int max_n = 6;
};

// Empirical pilot approximation of the least n = M whose sup-over-fine-grid
// RMS error against the reference falls below epsilon.  Throws if the guard
// max_n is exceeded before reaching epsilon.
int select_n(const BsdeProblem& p, const ReferenceSolution& ref, double epsilon,
             const PilotConfig& pilot);

// RMS over replications of the sup-over-fine-grid error of one (n, M)
// configuration against the reference (shared Brownian path).
double pilot_sup_rmse(const BsdeProblem& p, const ReferenceSolution& ref, int n,
                      std::int64_t M, int replications, MasterSeed base_seed);

}  // namespace mlpbsde
