#pragma once

// Self-contained invariant suites used by the CLI `validate` command and by
// the test harness.  Each suite is deterministic: a fixed seed drives every
// randomized probe, so repeated runs produce identical reports.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace mlpbsde {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;  // empty on success, diagnostic on failure
};

using GridFn = std::function<double(double, std::int64_t, double)>;  // (t, M, T)

struct ValidationOptions {
  // Injectable grid operators so a deliberately broken implementation can be
  // shown to fail the sandwich/set-reference checks.
  GridFn floor_fn;  // default: floor_grid
  GridFn ceil_fn;   // default: ceil_grid
  int grid_max_M = 16;
  int grid_mesh = 2000;       // mesh points per M (plus all nodes and T)
  int interp_cases = 200;     // randomized interpolation-lemma cases per lemma
  int gap_quadruples = 20000; // Lipschitz-gap random quadruples
  std::uint64_t seed = 0x5eedf00d;
};

std::vector<CheckResult> validate_grid_semantics(const ValidationOptions& opts);
std::vector<CheckResult> validate_interpolation(const ValidationOptions& opts);
std::vector<CheckResult> validate_mlp_structure(const ValidationOptions& opts);
std::vector<CheckResult> validate_path_terminal(const ValidationOptions& opts);
std::vector<CheckResult> validate_cost_conformance(const ValidationOptions& opts);
std::vector<CheckResult> validate_lipschitz_gap(const ValidationOptions& opts);
std::vector<CheckResult> validate_oracles(const ValidationOptions& opts);

// Runs every suite above in a fixed order.
std::vector<CheckResult> run_validation_suites(const ValidationOptions& opts = {});

// Brute-force set-based references for the grid operators: enumerate the
// candidate node sets literally and take max/min.
double floor_grid_reference(double t, std::int64_t M, double T);
double ceil_grid_reference(double t, std::int64_t M, double T);

}  // namespace mlpbsde
