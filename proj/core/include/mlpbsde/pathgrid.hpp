#pragma once

// Temporal grid operators, piecewise-linear interpolation, and the
// multi-grid path estimator built from telescoped MLP fields on nested
// uniform grids.

#include <cstdint>
#include <functional>
#include <vector>

#include <mlpbsde/mlp.hpp>
#include <mlpbsde/problem.hpp>
#include <mlpbsde/randomness.hpp>

namespace mlpbsde {

struct GridSpec {
  std::int64_t M = 1;
  int level = 0;
  double T = 1.0;

  [[nodiscard]] std::int64_t num_steps() const;   // M^level
  [[nodiscard]] double node(std::int64_t k) const;  // (k*T)/M^level
};

// max of {0, T/M, 2T/M, ...} intersected with [0,t] \ {T}; floor_grid(T) = (M-1)T/M.
double floor_grid(double t, std::int64_t M, double T);

// min of the grid intersected with (t, inf) union {T}.
double ceil_grid(double t, std::int64_t M, double T);

// Piecewise affine-linear value of `nodes` (values at the grid nodes) at t.
// Exact (bit-identical) at every grid node.
double interpolate(const std::vector<double>& nodes, const GridSpec& grid, double t);

struct PathEstimate {
  std::vector<double> fine_nodes;  // M^n + 1 values at {k*T/M^n}
  BrownianPath w_path;
  int n = 1;
  std::int64_t M = 1;
  double T = 1.0;
  int d = 1;
  CostCounters counters;
  MasterSeed seed;
};

// One realization of the telescoped multi-grid path estimator.  Level l
// uses the field U^{[l]}_{n-l,M} evaluated at the level-(l+1) grid nodes
// paired with the shared Brownian path; level-l coarse values are the same
// field at the same (t, W_t) points and are read from the nested fine
// evaluations.
PathEstimate path_estimate(const BsdeProblem& p, MasterSeed seed, int n, std::int64_t M);

// Linear interpolation of fine_nodes at arbitrary t in [0,T].
double path_value(const PathEstimate& est, double t);

// Serialization: CSV columns k, t_k, W_1..W_d, Y_k; JSON carries config and
// counters.  Floats printed with 17 significant digits.
std::string path_to_csv(const PathEstimate& est);
std::string path_to_json(const PathEstimate& est);

// Brute-force checkers for the interpolation lemmas.
struct InterpCase {
  std::function<double(double)> f;      // sampled function on [0,T]
  std::vector<double> partition;        // 0 = tau_0 < ... < tau_m = T
  double alpha = 1.0;                   // (0,2] for the error bound, (0,1] for Hoelder
  int dense_samples = 2000;
};

// sup_t |L(f)(t) - f(t)| <= 2^{-min(3,alpha)} max|dtau|^alpha * Hoelder seminorm,
// both sides evaluated over a dense sample; true if LHS <= RHS + 1e-10.
bool check_interp_error_bound(const InterpCase& c);

// Hoelder seminorm of the interpolant <= seminorm of the function (alpha <= 1).
bool check_interp_holder(const InterpCase& c);

}  // namespace mlpbsde
