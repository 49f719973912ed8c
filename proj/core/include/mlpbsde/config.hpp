#pragma once

// Key/value experiment configuration: an INI-style file with [problem],
// [method], [study] and [output] sections.  See the CLI README for the
// documented key schema.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <mlpbsde/problem.hpp>
#include <mlpbsde/randomness.hpp>

namespace mlpbsde {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  // [problem]
  std::string family = "cos_zero";
  int d = 1;
  std::map<std::string, double> problem_params;  // T, a, b, c, rho, beta, V0

  // [method]
  int n = 2;
  std::int64_t M = 2;
  MasterSeed seed{1};
  int replications = 1;

  // [study]
  std::vector<int> n_list;
  std::vector<int> d_list;
  double epsilon = 0.0;

  // [output]
  std::string out_dir = ".";
  std::vector<std::string> formats = {"csv", "json"};

  [[nodiscard]] BsdeProblem make_problem() const;
  [[nodiscard]] BsdeProblem make_problem(int dim) const;  // d override for sweeps

  // Round-trip echo of the parsed configuration (canonical key order).
  [[nodiscard]] std::string to_json() const;
};

// Parses the INI-style text.  Unknown sections or keys, malformed lines and
// unparsable numbers raise ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

}  // namespace mlpbsde
