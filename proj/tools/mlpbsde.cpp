// Experiment harness for the multilevel Picard BSDE solver.
//
// Exit codes: 0 success, 1 validation failure, 2 configuration error,
// 3 budget or resource-guard refusal.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include <mlpbsde/config.hpp>
#include <mlpbsde/cost.hpp>
#include <mlpbsde/mlp.hpp>
#include <mlpbsde/oracle.hpp>
#include <mlpbsde/pathgrid.hpp>
#include <mlpbsde/problem.hpp>
#include <mlpbsde/randomness.hpp>
#include <mlpbsde/validate.hpp>

#ifndef MLPBSDE_VERSION
#define MLPBSDE_VERSION "v0.0.0-unknown"
#endif

namespace {

using namespace mlpbsde;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitConfig = 2;
constexpr int kExitBudget = 3;

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct RunOptions {
  std::string config_path;
  std::string out_dir_override;
  int threads = 1;
  std::int64_t budget = 1'000'000'000'000;  // scalar-op budget, fail-fast
};

// Deterministic task-parallel loop: result i depends only on i, aggregation
// order is fixed by index, so output is independent of the thread count.
void parallel_for(int count, int threads, const std::function<void(int)>& body) {
  threads = std::clamp(threads, 1, count > 0 ? count : 1);
  if (threads == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

bool wants(const ExperimentConfig& cfg, const std::string& fmt) {
  return std::find(cfg.formats.begin(), cfg.formats.end(), fmt) != cfg.formats.end();
}

std::string sidecar_header(const ExperimentConfig& cfg) {
  return std::string("\"version\": \"") + MLPBSDE_VERSION + "\", \"config\": " + cfg.to_json();
}

// Oracle for the configured problem: closed form when the driver is affine,
// quadrature fixed point for nonlinear d = 1, otherwise unavailable.
ReferenceSolution make_oracle(const BsdeProblem& p) {
  if (p.driver.affine && p.terminal.gaussian_smoothing) return affine_closed_form(p);
  if (p.dim_d == 1) return picard_quadrature(p);
  throw ConfigError("no reference solution available for this problem (nonlinear driver, d > 1)");
}

int check_budget(std::int64_t predicted, std::int64_t budget) {
  if (predicted > budget) {
    std::cerr << "refusing to start: predicted cost " << predicted
              << " scalar ops exceeds budget " << budget << "\n";
    return kExitBudget;
  }
  return kExitOk;
}

int cmd_solve(const ExperimentConfig& cfg, const RunOptions& run) {
  const auto p = cfg.make_problem();
  if (const int rc = check_budget(cost_path_bound(cfg.n, cfg.M, p.dim_d + 3), run.budget))
    return rc;
  const auto est = path_estimate(p, cfg.seed, cfg.n, cfg.M);
  const auto report = bound_report(p, cfg.n, cfg.M);

  const std::filesystem::path dir(cfg.out_dir);
  std::filesystem::create_directories(dir);
  if (wants(cfg, "csv")) write_file(dir / "path.csv", path_to_csv(est));
  if (wants(cfg, "json")) {
    std::ostringstream js;
    js << "{" << sidecar_header(cfg) << ", \"path\": " << path_to_json(est)
       << ", \"bounds\": " << report.to_json() << "}\n";
    write_file(dir / "path.json", js.str());
  }
  std::cout << "wrote path estimate (" << est.fine_nodes.size() << " nodes) to " << dir.string()
            << "; measured cost " << est.counters.total() << " <= bound "
            << report.cost_path_exact << "\n";
  return kExitOk;
}

struct ConvergenceRow {
  int n = 0;
  std::int64_t M = 0;
  int R = 0;
  double sup_grid_rmse = 0.0;
  double rmse_stderr = 0.0;
  double theory_bound = 0.0;
  std::uint64_t measured_cost = 0;
  std::int64_t cost_bound = 0;
  double wall_time_s = 0.0;  // console only; kept out of files for reproducibility
};

double bootstrap_stderr(const std::vector<double>& sups, std::uint64_t seed) {
  const int B = 200;
  const std::size_t R = sups.size();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, R - 1);
  double mean = 0.0, m2 = 0.0;
  for (int b = 0; b < B; ++b) {
    double s = 0.0;
    for (std::size_t i = 0; i < R; ++i) {
      const double v = sups[pick(rng)];
      s += v * v;
    }
    const double rmse = std::sqrt(s / static_cast<double>(R));
    const double delta = rmse - mean;
    mean += delta / (b + 1);
    m2 += delta * (rmse - mean);
  }
  return std::sqrt(m2 / (B - 1));
}

ConvergenceRow convergence_row(const BsdeProblem& p, const ReferenceSolution& ref, int n,
                               std::int64_t M, int R, MasterSeed base_seed, int threads) {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> sups(static_cast<std::size_t>(R), 0.0);
  std::vector<std::uint64_t> costs(static_cast<std::size_t>(R), 0);
  parallel_for(R, threads, [&](int r) {
    const auto est = path_estimate(p, replication_seed(base_seed, static_cast<std::uint64_t>(r)),
                                   n, M);
    const std::int64_t N = static_cast<std::int64_t>(est.fine_nodes.size()) - 1;
    double sup = 0.0;
    for (std::int64_t k = 0; k <= N; ++k) {
      const double tk = (static_cast<double>(k) * p.horizon_T) / static_cast<double>(N);
      const double u = ref.evaluate(
          tk, std::span<const double>(est.w_path.node(static_cast<std::size_t>(k)),
                                      static_cast<std::size_t>(p.dim_d)));
      sup = std::max(sup, std::abs(est.fine_nodes[static_cast<std::size_t>(k)] - u));
    }
    sups[static_cast<std::size_t>(r)] = sup;
    costs[static_cast<std::size_t>(r)] = est.counters.total();
  });
  ConvergenceRow row;
  row.n = n;
  row.M = M;
  row.R = R;
  double s = 0.0;
  for (double v : sups) s += v * v;
  row.sup_grid_rmse = std::sqrt(s / R);
  row.rmse_stderr = (R > 1) ? bootstrap_stderr(sups, 0xb0075u ^ static_cast<std::uint64_t>(n))
                            : 0.0;
  row.theory_bound = err_bound_path(n, M, p.driver.lipschitz_L, p.horizon_T, p.rho,
                                    p.lyapunov_V0, normal_fourth_moment(p.dim_d));
  for (std::uint64_t c : costs) row.measured_cost += c;
  row.cost_bound = static_cast<std::int64_t>(R) * cost_path_bound(n, M, p.dim_d + 3);
  row.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

std::string convergence_csv(const std::vector<ConvergenceRow>& rows) {
  std::ostringstream out;
  out << "n,M,R,sup_grid_rmse,rmse_stderr,theory_bound,measured_cost,cost_bound\n";
  for (const auto& r : rows) {
    out << r.n << ',' << r.M << ',' << r.R << ',' << fmt17(r.sup_grid_rmse) << ','
        << fmt17(r.rmse_stderr) << ',' << fmt17(r.theory_bound) << ',' << r.measured_cost << ','
        << r.cost_bound << '\n';
  }
  return out.str();
}

int cmd_converge(const ExperimentConfig& cfg, const RunOptions& run) {
  const auto p = cfg.make_problem();
  std::vector<int> n_list = cfg.n_list;
  if (n_list.empty()) n_list = {cfg.n};
  std::int64_t predicted = 0;
  for (int n : n_list)
    predicted += static_cast<std::int64_t>(cfg.replications) * cost_path_bound(n, n, p.dim_d + 3);
  if (const int rc = check_budget(predicted, run.budget)) return rc;

  const auto ref = make_oracle(p);
  std::vector<ConvergenceRow> rows;
  rows.reserve(n_list.size());
  for (int n : n_list)
    rows.push_back(convergence_row(p, ref, n, n, cfg.replications, cfg.seed, run.threads));

  // log2 least-squares fit of error against n (slope ~ -n/2 * log2 M decay).
  double slope = 0.0;
  if (rows.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& r : rows) {
      const double x = r.n, y = std::log2(std::max(r.sup_grid_rmse, 1e-300));
      sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    const double den = rows.size() * sxx - sx * sx;
    slope = (rows.size() * sxy - sx * sy) / den;
  }

  const std::filesystem::path dir(cfg.out_dir);
  std::filesystem::create_directories(dir);
  if (wants(cfg, "csv")) write_file(dir / "convergence.csv", convergence_csv(rows));
  if (wants(cfg, "json")) {
    std::ostringstream js;
    js << "{" << sidecar_header(cfg) << ", \"log2_error_slope\": " << fmt17(slope)
       << ", \"rows\": [";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      js << (i ? ", " : "") << "{\"n\": " << r.n << ", \"M\": " << r.M << ", \"R\": " << r.R
         << ", \"sup_grid_rmse\": " << fmt17(r.sup_grid_rmse)
         << ", \"rmse_stderr\": " << fmt17(r.rmse_stderr)
         << ", \"theory_bound\": " << fmt17(r.theory_bound)
         << ", \"measured_cost\": " << r.measured_cost << ", \"cost_bound\": " << r.cost_bound
         << "}";
    }
    js << "]}\n";
    write_file(dir / "convergence.json", js.str());
  }

  // Errors measured as the sup over fine-grid nodes (the computable surrogate
  // for the continuum sup; the interpolant is affine between nodes).
  std::cout << "   n    M     R        sup_grid_rmse              theory_bound  wall_s\n";
  bool bound_ok = true;
  for (const auto& r : rows) {
    std::printf("%4d %4lld %5d %21.6e %25.6e %7.2f\n", r.n, static_cast<long long>(r.M), r.R,
                r.sup_grid_rmse, r.theory_bound, r.wall_time_s);
    if (!(r.sup_grid_rmse <= r.theory_bound)) bound_ok = false;
  }
  std::printf("log2-fit slope of error vs n: %.3f\n", slope);
  if (!bound_ok) {
    std::cerr << "validation failure: a row exceeds its theoretical error bound\n";
    return kExitValidation;
  }
  return kExitOk;
}

int cmd_cost(const ExperimentConfig& cfg, const RunOptions& run) {
  const int n_max = std::max(cfg.n, 1);
  const std::int64_t M_max = std::max<std::int64_t>(cfg.M, 1);
  std::vector<int> d_list = cfg.d_list;
  if (d_list.empty()) d_list = {1, 5, 10};

  std::int64_t predicted = 0;
  for (int d : d_list)
    for (int n = 1; n <= n_max; ++n)
      for (std::int64_t M = 1; M <= M_max; ++M)
        predicted += cost_path_bound(n, M, d + 3);
  if (const int rc = check_budget(predicted, run.budget)) return rc;

  std::ostringstream csv;
  csv << "d,n,M,measured_field,measured_path,recursion_field,recursion_path,closed_field,"
         "closed_path\n";
  bool chain_ok = true;
  for (int d : d_list) {
    const auto p = cfg.make_problem(d);
    std::vector<double> x(static_cast<std::size_t>(d), 0.1);
    for (int n = 1; n <= n_max; ++n) {
      for (std::int64_t M = 1; M <= M_max; ++M) {
        CostCounters cc;
        mlp_evaluate(p, cfg.seed, ThetaPath{}, MlpConfig{n, M}, 0.25, x, cc);
        const auto est = path_estimate(p, cfg.seed, n, M);
        const std::int64_t alpha = d + 3;
        const std::int64_t rf = cost_mlp_bound(n, M, alpha);
        const std::int64_t rp = cost_path_bound(n, M, alpha);
        const std::int64_t clf = cost_mlp_closed(n, M, alpha);
        const std::int64_t clp = cost_path_closed(n, M, alpha);
        csv << d << ',' << n << ',' << M << ',' << cc.total() << ',' << est.counters.total()
            << ',' << rf << ',' << rp << ',' << clf << ',' << clp << '\n';
        if (!(static_cast<std::int64_t>(cc.total()) <= rf && rf <= clf &&
              static_cast<std::int64_t>(est.counters.total()) <= rp && rp <= clp))
          chain_ok = false;
      }
    }
  }

  const std::filesystem::path dir(cfg.out_dir);
  std::filesystem::create_directories(dir);
  if (wants(cfg, "csv")) write_file(dir / "cost_table.csv", csv.str());
  if (wants(cfg, "json")) {
    std::ostringstream js;
    js << "{" << sidecar_header(cfg) << ", \"chain_holds\": " << (chain_ok ? "true" : "false")
       << "}\n";
    write_file(dir / "cost_table.json", js.str());
  }
  std::cout << csv.str();
  if (!chain_ok) {
    std::cerr << "validation failure: measured <= recursion <= closed-form chain violated\n";
    return kExitValidation;
  }
  return kExitOk;
}

int cmd_dimsweep(const ExperimentConfig& cfg, const RunOptions& run) {
  std::vector<int> d_list = cfg.d_list;
  if (d_list.empty()) d_list = {1, 2, 5, 10};
  const int n = cfg.n;
  const std::int64_t M = cfg.M;
  std::int64_t predicted = 0;
  for (int d : d_list)
    predicted += static_cast<std::int64_t>(cfg.replications) * cost_path_bound(n, M, d + 3);
  if (const int rc = check_budget(predicted, run.budget)) return rc;

  std::ostringstream csv;
  csv << "d,n,M,R,sup_grid_rmse,measured_cost,cost_bound\n";
  std::vector<double> log_d, log_cost;
  for (int d : d_list) {
    const auto p = cfg.make_problem(d);
    std::vector<double> sups(static_cast<std::size_t>(cfg.replications), 0.0);
    std::vector<std::uint64_t> costs(static_cast<std::size_t>(cfg.replications), 0);
    const bool have_oracle = p.driver.affine.has_value() && p.terminal.gaussian_smoothing != nullptr;
    ReferenceSolution ref;
    if (have_oracle) ref = affine_closed_form(p);
    parallel_for(cfg.replications, run.threads, [&](int r) {
      const auto est =
          path_estimate(p, replication_seed(cfg.seed, static_cast<std::uint64_t>(r)), n, M);
      costs[static_cast<std::size_t>(r)] = est.counters.total();
      if (!have_oracle) return;
      const std::int64_t N = static_cast<std::int64_t>(est.fine_nodes.size()) - 1;
      double sup = 0.0;
      for (std::int64_t k = 0; k <= N; ++k) {
        const double tk = (static_cast<double>(k) * p.horizon_T) / static_cast<double>(N);
        const double u = ref.evaluate(
            tk, std::span<const double>(est.w_path.node(static_cast<std::size_t>(k)),
                                        static_cast<std::size_t>(d)));
        sup = std::max(sup, std::abs(est.fine_nodes[static_cast<std::size_t>(k)] - u));
      }
      sups[static_cast<std::size_t>(r)] = sup;
    });
    double s = 0.0;
    std::uint64_t total_cost = 0;
    for (double v : sups) s += v * v;
    for (std::uint64_t c : costs) total_cost += c;
    const double rmse = std::sqrt(s / cfg.replications);
    csv << d << ',' << n << ',' << M << ',' << cfg.replications << ',' << fmt17(rmse) << ','
        << total_cost << ','
        << static_cast<std::int64_t>(cfg.replications) * cost_path_bound(n, M, d + 3) << '\n';
    log_d.push_back(std::log(static_cast<double>(d)));
    log_cost.push_back(std::log(static_cast<double>(total_cost)));
  }

  double slope = 0.0;
  if (log_d.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < log_d.size(); ++i) {
      sx += log_d[i]; sy += log_cost[i]; sxx += log_d[i] * log_d[i]; sxy += log_d[i] * log_cost[i];
    }
    const double den = log_d.size() * sxx - sx * sx;
    slope = (log_d.size() * sxy - sx * sy) / den;
  }

  const std::filesystem::path dir(cfg.out_dir);
  std::filesystem::create_directories(dir);
  if (wants(cfg, "csv")) write_file(dir / "dim_sweep.csv", csv.str());
  if (wants(cfg, "json")) {
    std::ostringstream js;
    js << "{" << sidecar_header(cfg) << ", \"loglog_cost_slope\": " << fmt17(slope) << "}\n";
    write_file(dir / "dim_sweep.json", js.str());
  }
  std::cout << csv.str();
  std::printf("log-log slope of cost vs d: %.3f\n", slope);
  return kExitOk;
}

int cmd_validate(const ExperimentConfig* cfg) {
  const auto results = run_validation_suites(ValidationOptions{});
  std::ostringstream report;
  int failures = 0;
  for (const auto& r : results) {
    report << (r.passed ? "PASS" : "FAIL") << "  " << r.name;
    if (!r.passed) {
      report << "  [" << r.detail << "]";
      ++failures;
    }
    report << "\n";
  }
  report << (failures ? "FAILED: " : "OK: ") << (results.size() - failures) << "/"
         << results.size() << " checks passed\n";
  std::cout << report.str();
  if (cfg) {
    const std::filesystem::path dir(cfg->out_dir);
    std::filesystem::create_directories(dir);
    write_file(dir / "validation.txt", report.str());
  }
  return failures ? kExitValidation : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multilevel Picard BSDE path solver and experiment harness"};
  app.set_version_flag("--version", MLPBSDE_VERSION);
  app.require_subcommand(1);
  app.fallthrough();  // `mlpbsde solve --config ...` resolves to the global options

  RunOptions run;
  app.add_option("--config", run.config_path, "experiment configuration file");
  app.add_option("--out", run.out_dir_override, "output directory override");
  app.add_option("--threads", run.threads, "worker thread count")->check(CLI::Range(1, 256));
  app.add_option("--budget", run.budget, "scalar-operation budget (fail fast when exceeded)")
      ->check(CLI::PositiveNumber);

  auto* solve = app.add_subcommand("solve", "one path realization");
  auto* converge = app.add_subcommand("converge", "error-vs-level convergence study");
  auto* cost = app.add_subcommand("cost", "measured vs analytic cost table");
  auto* dimsweep = app.add_subcommand("dimsweep", "cost/error sweep over dimension");
  auto* validate = app.add_subcommand("validate", "run the invariant suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    ExperimentConfig cfg;
    const bool have_cfg = !run.config_path.empty();
    if (have_cfg) cfg = load_config(run.config_path);
    if (!run.out_dir_override.empty()) cfg.out_dir = run.out_dir_override;

    if (validate->parsed()) return cmd_validate(have_cfg ? &cfg : nullptr);
    if (!have_cfg) {
      std::cerr << "error: --config is required for this command\n";
      return kExitConfig;
    }
    if (solve->parsed()) return cmd_solve(cfg, run);
    if (converge->parsed()) return cmd_converge(cfg, run);
    if (cost->parsed()) return cmd_cost(cfg, run);
    if (dimsweep->parsed()) return cmd_dimsweep(cfg, run);
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::overflow_error& e) {
    std::cerr << "guard refusal: " << e.what() << "\n";
    return kExitBudget;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}
