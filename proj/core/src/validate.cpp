#include <mlpbsde/validate.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <mlpbsde/cost.hpp>
#include <mlpbsde/mlp.hpp>
#include <mlpbsde/oracle.hpp>
#include <mlpbsde/pathgrid.hpp>
#include <mlpbsde/problem.hpp>
#include <mlpbsde/randomness.hpp>

namespace mlpbsde {

namespace {

void push(std::vector<CheckResult>& out, const std::string& name, bool ok,
          const std::string& detail = "") {
  out.push_back(CheckResult{name, ok, ok ? "" : detail});
}

std::string num(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

GridFn effective(const GridFn& fn, double (*fallback)(double, std::int64_t, double)) {
  if (fn) return fn;
  return [fallback](double t, std::int64_t M, double T) { return fallback(t, M, T); };
}

}  // namespace

double floor_grid_reference(double t, std::int64_t M, double T) {
  // max(([0,t] \ {T}) intersect {0, T/M, 2T/M, ...}), enumerated literally.
  bool found = false;
  double best = 0.0;
  for (std::int64_t k = 0; k <= M; ++k) {
    const double node = (k == M) ? T : (static_cast<double>(k) * T) / static_cast<double>(M);
    if (node == T) continue;
    if (node <= t && (!found || node > best)) {
      best = node;
      found = true;
    }
  }
  return best;
}

double ceil_grid_reference(double t, std::int64_t M, double T) {
  // min(((t, inf) union {T}) intersect grid).
  bool found = false;
  double best = 0.0;
  for (std::int64_t k = 0; k <= M; ++k) {
    const double node = (k == M) ? T : (static_cast<double>(k) * T) / static_cast<double>(M);
    if (node > t || node == T) {
      if (!found || node < best) {
        best = node;
        found = true;
      }
    }
  }
  return best;
}

std::vector<CheckResult> validate_grid_semantics(const ValidationOptions& opts) {
  std::vector<CheckResult> out;
  const GridFn fl = effective(opts.floor_fn, floor_grid);
  const GridFn ce = effective(opts.ceil_fn, ceil_grid);

  for (double T : {1.0, 0.7}) {
    bool floor_ok = true, ceil_ok = true, sandwich_ok = true;
    std::string floor_detail, ceil_detail, sandwich_detail;
    for (std::int64_t M = 1; M <= opts.grid_max_M; ++M) {
      std::vector<double> probes;
      probes.reserve(static_cast<std::size_t>(opts.grid_mesh) + M + 2);
      for (int i = 0; i < opts.grid_mesh; ++i)
        probes.push_back(T * static_cast<double>(i) / (opts.grid_mesh - 1));
      for (std::int64_t k = 0; k < M; ++k)
        probes.push_back((static_cast<double>(k) * T) / static_cast<double>(M));
      probes.push_back(T);
      for (double t : probes) {
        const double f = fl(t, M, T), fr = floor_grid_reference(t, M, T);
        const double c = ce(t, M, T), cr = ceil_grid_reference(t, M, T);
        if (f != fr && floor_ok) {
          floor_ok = false;
          floor_detail = "floor(t=" + num(t) + ", M=" + std::to_string(M) + ", T=" + num(T) +
                         ") = " + num(f) + ", set reference " + num(fr);
        }
        if (c != cr && ceil_ok) {
          ceil_ok = false;
          ceil_detail = "ceil(t=" + num(t) + ", M=" + std::to_string(M) + ", T=" + num(T) +
                        ") = " + num(c) + ", set reference " + num(cr);
        }
        // Sandwich: floor <= t (t < T) and floor <= ceil; ceil >= t or ceil = T.
        if ((f > t || f > c || (c < t && c != T)) && sandwich_ok) {
          sandwich_ok = false;
          sandwich_detail = "t=" + num(t) + ", M=" + std::to_string(M) + ": floor=" + num(f) +
                            ", ceil=" + num(c);
        }
      }
    }
    const std::string suffix = " (T=" + num(T) + ")";
    push(out, "grid: floor matches set reference" + suffix, floor_ok, floor_detail);
    push(out, "grid: ceil matches set reference" + suffix, ceil_ok, ceil_detail);
    push(out, "grid: floor/ceil sandwich" + suffix, sandwich_ok, sandwich_detail);
  }
  return out;
}

std::vector<CheckResult> validate_interpolation(const ValidationOptions& opts) {
  std::vector<CheckResult> out;
  std::mt19937_64 rng(opts.seed ^ 0x1217);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  int bound_fail = -1, holder_fail = -1;
  for (int c = 0; c < opts.interp_cases; ++c) {
    const double T = 0.5 + unif(rng);
    const int m = 1 + static_cast<int>(unif(rng) * 8);
    std::vector<double> part{0.0};
    for (int i = 0; i < m - 1; ++i) part.push_back(unif(rng) * T);
    part.push_back(T);
    std::sort(part.begin(), part.end());
    part.erase(std::unique(part.begin(), part.end()), part.end());
    if (part.size() < 2) part = {0.0, T};

    const int kind = c % 3;
    const double a = 1.0 + 4.0 * unif(rng), b = unif(rng) * 6.28318;
    const double cusp = unif(rng) * T;
    const double alpha_h = 0.3 + 0.7 * unif(rng);  // (0,1] regime
    std::function<double(double)> f;
    double alpha = 1.0;
    if (kind == 0) {
      f = [a, b](double t) { return std::sin(a * t + b); };
      alpha = 1.0;
    } else if (kind == 1) {
      f = [cusp, alpha_h](double t) { return std::pow(std::abs(t - cusp), alpha_h); };
      alpha = alpha_h;
    } else {
      f = [a, b](double t) { return std::cos(a * t) + 0.25 * std::sin(7.0 * t + b); };
      alpha = 1.0;
    }

    InterpCase ic{f, part, alpha, 1000};
    if (!check_interp_error_bound(ic) && bound_fail < 0) bound_fail = c;
    if (alpha <= 1.0 && !check_interp_holder(ic) && holder_fail < 0) holder_fail = c;

    // A smooth-function case also exercises the alpha in (1,2] regime.
    if (kind == 0) {
      InterpCase ic2{f, part, 1.5, 1000};
      if (!check_interp_error_bound(ic2) && bound_fail < 0) bound_fail = c;
    }
  }
  push(out, "interp: piecewise-linear error bound (" + std::to_string(opts.interp_cases) +
            " randomized cases)",
       bound_fail < 0, "first failing case index " + std::to_string(bound_fail));
  push(out, "interp: interpolant Hoelder seminorm dominated", holder_fail < 0,
       "first failing case index " + std::to_string(holder_fail));
  return out;
}

std::vector<CheckResult> validate_mlp_structure(const ValidationOptions& opts) {
  std::vector<CheckResult> out;
  const MasterSeed seed{opts.seed};

  // n = 0 is identically zero.
  {
    const auto p = builtin_problem(Family::cos_affine, 3);
    CostCounters cc;
    const double x[3] = {0.1, -0.4, 0.7};
    const double v = mlp_evaluate(p, seed, ThetaPath{}, MlpConfig{0, 4}, 0.3, x, cc);
    push(out, "mlp: level zero is identically zero", v == 0.0 && cc.total() == 0,
         "value " + num(v));
  }

  // Terminal exactness U_{n,M}(T, x) = g(x).
  {
    bool ok = true;
    std::string detail;
    for (int d : {1, 5}) {
      const auto p = builtin_problem(Family::cos_affine, d);
      std::vector<double> x(static_cast<std::size_t>(d), 0.2);
      CostCounters cc;
      for (int n = 1; n <= 3 && ok; ++n) {
        const double v = mlp_evaluate(p, seed, ThetaPath{}, MlpConfig{n, 2}, p.horizon_T, x, cc);
        const double g = p.terminal.evaluate(x);
        if (std::abs(v - g) > 1e-12) {
          ok = false;
          detail = "d=" + std::to_string(d) + ", n=" + std::to_string(n) + ": |U-g| = " +
                   num(std::abs(v - g));
        }
      }
    }
    push(out, "mlp: terminal value equals g(x) to 1e-12", ok, detail);
  }

  // Field shift-linearity with f == 0 and linear g: U(t, x+h) - U(t, x) = g(h).
  {
    BsdeProblem p;
    p.horizon_T = 1.0;
    p.dim_d = 2;
    p.driver.evaluate = [](double, std::span<const double>, double) { return 0.0; };
    p.terminal.evaluate = [](std::span<const double> x) { return 2.0 * x[0] - x[1]; };
    const double x0[2] = {0.25, -0.5}, x1[2] = {0.25 + 0.375, -0.5 + 1.25};
    CostCounters cc;
    const double u0 = mlp_evaluate(p, seed, ThetaPath{}, MlpConfig{3, 2}, 0.4, x0, cc);
    const double u1 = mlp_evaluate(p, seed, ThetaPath{}, MlpConfig{3, 2}, 0.4, x1, cc);
    const double gh = 2.0 * 0.375 - 1.25;
    push(out, "mlp: shift linearity for zero driver and linear terminal",
         std::abs((u1 - u0) - gh) <= 1e-12, "difference " + num((u1 - u0) - gh));
  }

  // Bitwise determinism.
  {
    const auto p = builtin_problem(Family::cos_affine, 2);
    const double x[2] = {0.1, 0.2};
    CostCounters c1, c2;
    const double v1 = mlp_evaluate(p, seed, ThetaPath({3, -1}), MlpConfig{2, 3}, 0.25, x, c1);
    const double v2 = mlp_evaluate(p, seed, ThetaPath({3, -1}), MlpConfig{2, 3}, 0.25, x, c2);
    push(out, "mlp: repeated evaluation is bit-identical",
         v1 == v2 && c1.total() == c2.total(), "values differ");
  }
  return out;
}

std::vector<CheckResult> validate_path_terminal(const ValidationOptions& opts) {
  std::vector<CheckResult> out;
  bool term_ok = true, head_ok = true, det_ok = true;
  std::string term_detail, head_detail;
  for (int d : {1, 5}) {
    const auto p = builtin_problem(Family::cos_affine, d);
    for (int n = 1; n <= 3; ++n) {
      for (std::int64_t M = 1; M <= 3; ++M) {
        const MasterSeed s = replication_seed(MasterSeed{opts.seed},
                                              static_cast<std::uint64_t>(100 * d + 10 * n + M));
        const auto est = path_estimate(p, s, n, M);
        const std::size_t last = est.fine_nodes.size() - 1;
        const double g = p.terminal.evaluate(
            std::span<const double>(est.w_path.node(last), static_cast<std::size_t>(d)));
        if (std::abs(est.fine_nodes[last] - g) > 1e-12 && term_ok) {
          term_ok = false;
          term_detail = "d=" + std::to_string(d) + " n=" + std::to_string(n) + " M=" +
                        std::to_string(M) + ": |Y_T - g(W_T)| = " +
                        num(std::abs(est.fine_nodes[last] - g));
        }
        // Y_0 telescopes to the level-0 field at the origin.
        CostCounters cc;
        std::vector<double> origin(static_cast<std::size_t>(d), 0.0);
        const double u0 = mlp_evaluate(p, s, ThetaPath({0}), MlpConfig{n, M}, 0.0, origin, cc);
        if (std::abs(est.fine_nodes[0] - u0) > 1e-12 && head_ok) {
          head_ok = false;
          head_detail = "d=" + std::to_string(d) + " n=" + std::to_string(n) + " M=" +
                        std::to_string(M);
        }
        const auto est2 = path_estimate(p, s, n, M);
        if (est2.fine_nodes != est.fine_nodes) det_ok = false;
      }
    }
  }
  push(out, "path: terminal node equals g(W_T) to 1e-12", term_ok, term_detail);
  push(out, "path: initial node telescopes to the level-0 field", head_ok, head_detail);
  push(out, "path: repeated realization is bit-identical", det_ok, "nodes differ");
  return out;
}

std::vector<CheckResult> validate_cost_conformance(const ValidationOptions& opts) {
  std::vector<CheckResult> out;
  bool chain_ok = true;
  std::string chain_detail;
  std::vector<std::uint64_t> totals_by_d;
  for (int d : {1, 2, 3, 5}) {
    const auto p = builtin_problem(Family::cos_affine, d);
    std::vector<double> x(static_cast<std::size_t>(d), 0.1);
    const std::int64_t alpha = d + 3;
    std::uint64_t fixed_cfg_total = 0;
    for (int n = 1; n <= 3; ++n) {
      for (std::int64_t M = 1; M <= 3; ++M) {
        CostCounters cc;
        mlp_evaluate(p, MasterSeed{opts.seed}, ThetaPath{}, MlpConfig{n, M}, 0.2, x, cc);
        const std::int64_t rec = cost_mlp_bound(n, M, alpha);
        const std::int64_t closed = cost_mlp_closed(n, M, alpha);
        if (!(static_cast<std::int64_t>(cc.total()) <= rec && rec <= closed) && chain_ok) {
          chain_ok = false;
          chain_detail = "d=" + std::to_string(d) + " n=" + std::to_string(n) + " M=" +
                         std::to_string(M) + ": measured " + std::to_string(cc.total()) +
                         ", recursion " + std::to_string(rec) + ", closed " +
                         std::to_string(closed);
        }
        if (n == 3 && M == 2) fixed_cfg_total = cc.total();

        const auto est = path_estimate(p, MasterSeed{opts.seed}, n, M);
        const std::int64_t prec = cost_path_bound(n, M, alpha);
        const std::int64_t pclosed = cost_path_closed(n, M, alpha);
        if (!(static_cast<std::int64_t>(est.counters.total()) <= prec && prec <= pclosed) &&
            chain_ok) {
          chain_ok = false;
          chain_detail = "path d=" + std::to_string(d) + " n=" + std::to_string(n) + " M=" +
                         std::to_string(M) + ": measured " +
                         std::to_string(est.counters.total()) + ", recursion " +
                         std::to_string(prec) + ", closed " + std::to_string(pclosed);
        }
      }
    }
    totals_by_d.push_back(fixed_cfg_total);
  }
  push(out, "cost: measured <= recursion (alpha = d+3) <= closed form", chain_ok, chain_detail);
  // d in {1,2,3,5}: affinity means total(d) = A + B d.
  const std::int64_t B = static_cast<std::int64_t>(totals_by_d[1]) -
                         static_cast<std::int64_t>(totals_by_d[0]);
  const bool affine = static_cast<std::int64_t>(totals_by_d[2]) -
                              static_cast<std::int64_t>(totals_by_d[1]) == B &&
                      static_cast<std::int64_t>(totals_by_d[3]) -
                              static_cast<std::int64_t>(totals_by_d[2]) == 2 * B;
  push(out, "cost: measured total exactly affine in d", affine,
       "increments " + std::to_string(totals_by_d[1] - totals_by_d[0]) + ", " +
           std::to_string(totals_by_d[2] - totals_by_d[1]) + ", " +
           std::to_string(totals_by_d[3] - totals_by_d[2]));
  return out;
}

std::vector<CheckResult> validate_lipschitz_gap(const ValidationOptions& opts) {
  std::vector<CheckResult> out;
  std::mt19937_64 rng(opts.seed ^ 0x9a9a);
  std::uniform_real_distribution<double> box(-10.0, 10.0);
  const auto sinf = [](double x) { return std::sin(x); };
  int fail = -1;
  for (int i = 0; i < opts.gap_quadruples; ++i) {
    const double v1 = box(rng), v2 = box(rng), w1 = box(rng), w2 = box(rng);
    const auto g = lipschitz_gap_check(sinf, 1.0, 1.0, v1, v2, w1, w2);
    if (!g.holds && fail < 0) fail = i;
  }
  push(out, "gap: sin inequality over " + std::to_string(opts.gap_quadruples) +
            " random quadruples",
       fail < 0, "first failing quadruple index " + std::to_string(fail));

  const auto lin = [](double x) { return 3.0 * x; };
  const auto g = lipschitz_gap_check(lin, 3.0, 0.0, 1.2, -0.4, 0.9, 2.6);
  push(out, "gap: affine map attains equality",
       g.holds && std::abs(g.lhs - g.rhs) <= 1e-12,
       "lhs " + num(g.lhs) + ", rhs " + num(g.rhs));
  return out;
}

std::vector<CheckResult> validate_oracles(const ValidationOptions& opts) {
  std::vector<CheckResult> out;
  // Closed-form fixture values.
  {
    const auto p0 = builtin_problem(Family::cos_zero, 1);
    const auto ref0 = affine_closed_form(p0);
    push(out, "oracle: cos family with zero driver at the origin",
         std::abs(ref0.at(0.0, 0.0) - std::exp(-0.5)) <= 1e-12,
         num(ref0.at(0.0, 0.0)));
    const auto p1 = builtin_problem(Family::cos_affine, 1, {{"a", 1.0}, {"b", 0.0}});
    const auto ref1 = affine_closed_form(p1);
    push(out, "oracle: unit-rate affine driver at the origin",
         std::abs(ref1.at(0.0, 0.0) - std::exp(0.5)) <= 1e-12, num(ref1.at(0.0, 0.0)));
  }
  // Quadrature fixed point vs the closed form at random probes.
  {
    const auto p = builtin_problem(Family::cos_affine, 1);
    const auto closed = affine_closed_form(p);
    PicardQuadratureOptions q;
    q.time_nodes = 25;
    q.space_grid = 181;
    q.gh_nodes = 96;
    q.space_radius = 9.0;
    const auto pic = picard_quadrature(p, q);
    std::mt19937_64 rng(opts.seed ^ 0xace);
    std::uniform_real_distribution<double> ut(0.0, p.horizon_T), ux(-2.0, 2.0);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
      const double t = ut(rng), x = ux(rng);
      worst = std::max(worst, std::abs(pic.at(t, x) - closed.at(t, x)));
    }
    push(out, "oracle: quadrature fixed point matches closed form to 1e-6", worst <= 1e-6,
         "worst |difference| " + num(worst));
  }
  // Nested Monte Carlo sanity in d = 1.
  {
    const auto p = builtin_problem(Family::cos_affine, 1);
    const auto closed = affine_closed_form(p);
    const double x0[1] = {0.0};
    const auto mc = nested_mc(p, 0.0, x0, 2, 400, opts.seed ^ 0x77);
    const double gap = std::abs(mc.value - closed.at(0.0, 0.0));
    push(out, "oracle: nested Monte Carlo within 4 standard errors of closed form",
         gap <= 4.0 * mc.stderr_ && mc.stderr_ > 0.0,
         "gap " + num(gap) + ", stderr " + num(mc.stderr_));
  }
  return out;
}

std::vector<CheckResult> run_validation_suites(const ValidationOptions& opts) {
  std::vector<CheckResult> out;
  for (auto* suite : {&validate_grid_semantics, &validate_interpolation,
                      &validate_mlp_structure, &validate_path_terminal,
                      &validate_cost_conformance, &validate_lipschitz_gap,
                      &validate_oracles}) {
    auto part = (*suite)(opts);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

}  // namespace mlpbsde
