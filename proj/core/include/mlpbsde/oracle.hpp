#pragma once

// Independent reference solutions for the stochastic fixed-point equation
//   u(t,x) = E[g(x + W_{T-t})] + int_t^T E[f(s, x + W_{s-t}, u(s, x + W_{s-t}))] ds
// plus the second-order Lipschitz-gap checker.

#include <cstdint>
#include <functional>
#include <span>

#include <mlpbsde/problem.hpp>

namespace mlpbsde {

enum class OracleKind { affine_closed_form, picard_quadrature, nested_mc };

struct ReferenceSolution {
  std::function<double(double, std::span<const double>)> evaluate;  // u(t, x)
  OracleKind kind = OracleKind::affine_closed_form;
  double accuracy = 0.0;  // guaranteed or estimated absolute accuracy

  [[nodiscard]] double at(double t, double x) const {
    const double xv[1] = {x};
    return evaluate(t, xv);
  }
};

// Closed form for affine drivers f(v) = a v + b with analytic smoothing G:
//   u(t,x) = e^{a(T-t)} G(T-t, x) + (b/a)(e^{a(T-t)} - 1)      (a != 0)
//   u(t,x) = G(T-t, x) + b (T-t)                               (a  = 0)
ReferenceSolution affine_closed_form(const BsdeProblem& p);

struct PicardQuadratureOptions {
  int time_nodes = 41;
  int space_grid = 301;
  int iters = 40;
  double space_radius = 12.0;
  int gh_nodes = 200;       // Gauss-Hermite, truncated at |z| <= 8
  int gl_nodes = 24;        // Gauss-Legendre nodes for the time integral
  double tol = 1e-10;
};

// Fixed-point iteration of the SFPE on a time x space tensor grid, d = 1.
// Refuses LT >= 1 (contraction not guaranteed).
ReferenceSolution picard_quadrature(const BsdeProblem& p,
                                    const PicardQuadratureOptions& opts = {});

// Quadrature evaluation of Phi(ref)(t,x) - ref(t,x), d = 1; near zero when
// ref solves the SFPE.
double sfpe_residual(const BsdeProblem& p, const ReferenceSolution& ref, double t, double x);

struct NestedMcResult {
  double value = 0.0;
  double stderr_ = 0.0;
};

// Truncated Picard iterate estimated by crude nested Monte Carlo; d >= 1
// spot checks.  depth <= 2, samples_per_level^depth <= 1e8.
NestedMcResult nested_mc(const BsdeProblem& p, double t, std::span<const double> x,
                         int depth, std::int64_t samples_per_level,
                         std::uint64_t mc_seed = 0x9d5c0f2b);

struct GapCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

// Second-order difference-of-differences inequality for f in C^2 with
// sup|f'| <= B1 and sup|f''| <= B2:
//   |(f(v1)-f(w1)) - (f(v2)-f(w2))|
//     <= B1 |(v1-w1)-(v2-w2)| + (B2/2)(|v1-w1|+|v2-w2|) min{|v1-v2|,|w1-w2|}.
GapCheck lipschitz_gap_check(const std::function<double(double)>& f, double B1, double B2,
                             double v1, double v2, double w1, double w2);

}  // namespace mlpbsde
