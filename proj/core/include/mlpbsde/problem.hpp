#pragma once

// BSDE problem instances: driver f, terminal condition g, and the scalar
// hypothesis constants entering the analytic bounds.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mlpbsde {

struct AffineParams {
  double a = 0.0;
  double b = 0.0;
};

struct DriverSpec {
  // f(t, x, v)
  std::function<double(double, std::span<const double>, double)> evaluate;
  double lipschitz_L = 0.0;
  std::optional<AffineParams> affine;  // set iff f(t,x,v) = a*v + b exactly
  bool depends_on_t = false;
  bool depends_on_x = false;
};

struct TerminalSpec {
  // g(x)
  std::function<double(std::span<const double>)> evaluate;
  // G(s, x) = E[g(x + sqrt(s) Z)], Z standard normal; empty if no closed form.
  std::function<double(double, std::span<const double>)> gaussian_smoothing;
};

struct BsdeProblem {
  double horizon_T = 1.0;
  int dim_d = 1;
  DriverSpec driver;
  TerminalSpec terminal;
  double rho = 0.0;            // Lyapunov growth rate
  double beta = 1.0 / 12.0;    // must lie in (0, 1/12]
  double lyapunov_V0 = 1.0;    // V at the path origin, >= 1

  std::string family;          // builtin family name, empty for custom problems
  std::vector<double> c;       // exp_affine direction vector (empty otherwise)
};

enum class Family { cos_zero, cos_affine, exp_affine, cos_sine };

Family parse_family(const std::string& name);
std::string family_name(Family f);

// Builtin families.  Supported params keys: T, a, b, c, rho, beta, V0
// (family-specific subset; unknown keys rejected).  Defaults: T=1, a=0.3,
// b=0.1, c_i=0.1, beta=1/12, V0=1; rho defaults to 0 except exp_affine,
// where it is set to ||c||^2/(2 beta^2) so the Lyapunov growth condition
// actually holds.
BsdeProblem builtin_problem(Family family, int d,
                            const std::map<std::string, double>& params = {});
BsdeProblem builtin_problem(const std::string& family, int d,
                            const std::map<std::string, double>& params = {});

// Advisory hypothesis checks (randomized probes); never throws on content.
std::vector<std::string> validate_problem(const BsdeProblem& p);

}  // namespace mlpbsde
