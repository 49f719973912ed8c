#pragma once

// Full-history recursive multilevel Picard estimator U_{n,M}^theta(t,x)
// with exact cost instrumentation.

#include <cstdint>
#include <span>
#include <string>

#include <mlpbsde/problem.hpp>
#include <mlpbsde/randomness.hpp>

namespace mlpbsde {

struct MlpConfig {
  int n = 1;            // Picard level, 0 <= n <= 8
  std::int64_t M = 1;   // sample base, (5M)^n <= 1e9
};

void check_guards(const MlpConfig& cfg);

struct CostCounters {
  std::uint64_t rv_scalars = 0;  // each uniform = 1, each d-dim normal = d
  std::uint64_t f_evals = 0;
  std::uint64_t g_evals = 0;

  [[nodiscard]] std::uint64_t total() const { return rv_scalars + f_evals + g_evals; }

  CostCounters& operator+=(const CostCounters& o) {
    rv_scalars += o.rv_scalars;
    f_evals += o.f_evals;
    g_evals += o.g_evals;
    return *this;
  }

  [[nodiscard]] std::string to_json() const;
};

// One evaluation of the recursion.  Deterministic in all arguments; sums
// reduce in ascending index order.  Counters accumulate d per normal
// vector, 1 per uniform, 1 per f call, 1 per g call.
double mlp_evaluate(const BsdeProblem& p, MasterSeed seed, const ThetaPath& theta,
                    const MlpConfig& cfg, double t, std::span<const double> x,
                    CostCounters& counters);

// Handle for the random field U^theta: every call shares the realization
// indexed by theta.  Shareable read-only across threads.
class MlpField {
 public:
  MlpField(const BsdeProblem& p, MasterSeed seed, ThetaPath theta, MlpConfig cfg)
      : p_(&p), seed_(seed), theta_(std::move(theta)), cfg_(cfg) {}

  double operator()(double t, std::span<const double> x, CostCounters& counters) const {
    return mlp_evaluate(*p_, seed_, theta_, cfg_, t, x, counters);
  }

  [[nodiscard]] const MlpConfig& config() const { return cfg_; }

 private:
  const BsdeProblem* p_;
  MasterSeed seed_;
  ThetaPath theta_;
  MlpConfig cfg_;
};

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
};

// Averages `replications` independent (distinct-seed) evaluations of
// U_{1,M}(t, x) for a d=1 problem; see the quadrature oracle in tests for
// the analytic mean it is compared against.
MeanStderr mlp_expectation_check(const BsdeProblem& p, MasterSeed base_seed,
                                 std::int64_t M, double t, double x, int replications);

}  // namespace mlpbsde
