#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stefanopt/analysis.hpp"
#include "stefanopt/config.hpp"
#include "stefanopt/io.hpp"
#include "stefanopt/optimize.hpp"
#include "stefanopt/verify.hpp"

namespace fs = std::filesystem;
using namespace stefanopt;

namespace {

struct CliArgs {
  std::string config_path;
  std::string out_dir;
  int n = 0;
  int m = 0;
  long seed = -1;
  int max_iters = 0;
  double tol = 0.0;
  std::string method;
  std::string n_list;
  bool print_config = false;
};

void apply_overrides(RunConfig& cfg, const CliArgs& args) {
  if (!args.out_dir.empty()) cfg.output = args.out_dir;
  if (args.n > 0) cfg.run.n = args.n;
  if (args.m > 0) cfg.run.m = args.m;
  if (args.seed >= 0) cfg.run.seed = static_cast<unsigned>(args.seed);
  if (args.max_iters > 0) cfg.run.max_iters = args.max_iters;
  if (args.tol > 0.0) cfg.run.tol = args.tol;
  if (!args.method.empty()) cfg.run.method = args.method;
  if (!args.n_list.empty()) {
    cfg.run.n_list.clear();
    std::size_t pos = 0;
    while (pos < args.n_list.size()) {
      std::size_t next = args.n_list.find(',', pos);
      if (next == std::string::npos) next = args.n_list.size();
      cfg.run.n_list.push_back(std::stoi(args.n_list.substr(pos, next - pos)));
      pos = next + 1;
    }
  }
}

fs::path ensure_out_dir(const RunConfig& cfg) {
  fs::path dir(cfg.output);
  fs::create_directories(dir);
  return dir;
}

// Sampled data checks are soundness warnings, never a gate.
void warn_on_data(const ProblemData& pd) {
  const ValidationReport rep = validate_data(pd, 16);
  for (const auto& v : rep.violations)
    std::cerr << "warning: " << v.assumption << " (worst " << v.worst << " at x=" << v.x
              << ", t=" << v.t << ")\n";
}

int cmd_forward(const RunConfig& cfg) {
  warn_on_data(cfg.problem);
  const ContinuousControl truth = truth_control(cfg);
  const DiscreteControl dc = sample_Qn(truth, cfg.run.n);
  const DiscreteStateVector dsv = solve_state(dc, cfg.problem, cfg.run.m);
  const CostBreakdown cb = discrete_cost(dsv, dc, cfg.problem);
  const EnergyReport er = energy_report(dsv, dc, cfg.problem);

  const fs::path dir = ensure_out_dir(cfg);
  write_state_csv((dir / "state.csv").string(), dsv);
  write_json_file((dir / "cost.json").string(), cost_to_json(cb));
  write_json_file((dir / "energy.json").string(), energy_to_json(er));
  std::cout << "forward: n=" << cfg.run.n << " m=" << cfg.run.m << " cost=" << fmt17(cb.total)
            << "\n";
  return 0;
}

int cmd_invert(const RunConfig& cfg) {
  warn_on_data(cfg.problem);
  const int n = cfg.run.n;
  const ContinuousControl truth = truth_control(cfg);
  const DiscreteControl dc_truth = sample_Qn(truth, n);
  const DiscreteStateVector dsv_truth = solve_state(dc_truth, cfg.problem, cfg.run.m);

  // Synthetic targets: the truth run's own boundary traces.
  CostTargets targets;
  targets.nu.resize(n);
  targets.mu.resize(n);
  for (int k = 1; k <= n; ++k) {
    targets.nu[k - 1] = dsv_truth.slices[k].nodal.front();
    targets.mu[k - 1] = dsv_truth.slices[k].nodal.back();
  }

  const DiscreteControl init = initial_control(cfg, n);
  const OptOptions opts = cfg.run.opt_options();
  const OptResult res = minimize(cfg.problem, n, cfg.run.m, init, opts, &targets);

  const fs::path dir = ensure_out_dir(cfg);
  write_json_file((dir / "result.json").string(), result_to_json(res));
  write_history_csv((dir / "history.csv").string(), res.history);
  write_control_csv((dir / "recovered_control.csv").string(), res.best);
  std::cout << "invert: iters=" << res.iters << " best_cost=" << fmt17(res.best_cost)
            << (res.converged ? " (converged)" : " (budget exhausted)") << "\n";
  return 0;
}

int cmd_verify(const RunConfig& cfg) {
  const auto results = run_verify_suites(cfg.problem, cfg.run.seed);
  bool all = true;
  for (const auto& r : results) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name;
    if (!r.passed && !r.detail.empty()) std::cout << ": " << r.detail;
    std::cout << "\n";
    all = all && r.passed;
  }
  return all ? 0 : 3;
}

int cmd_sweep(const RunConfig& cfg) {
  warn_on_data(cfg.problem);
  const ContinuousControl truth = truth_control(cfg);
  std::vector<int> n_list = cfg.run.n_list;
  if (n_list.empty()) throw ConfigError("run.n_list is required for sweep");
  const double ratio = static_cast<double>(cfg.run.m) / cfg.run.n;
  auto m_of_n = [ratio](int n) {
    return std::max(2, static_cast<int>(std::lround(ratio * n)));
  };
  const SweepTable table = convergence_sweep(cfg.problem, truth, n_list, m_of_n);
  const fs::path dir = ensure_out_dir(cfg);
  write_sweep_csv((dir / "sweep.csv").string(), table);
  for (const auto& row : table.rows) {
    if (row.ok)
      std::cout << "sweep: n=" << row.n << " m=" << row.m << " cost=" << fmt17(row.cost) << "\n";
    else
      std::cout << "sweep: n=" << row.n << " failed: " << row.error << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal-control solver for the one-phase inverse Stefan problem"};
  app.require_subcommand(1);

  CliArgs args;
  app.add_option("--config", args.config_path, "Path to the JSON configuration")->required();
  app.add_option("--out", args.out_dir, "Output directory (overrides config)");
  app.add_option("--n", args.n, "Time steps (overrides config)");
  app.add_option("--m", args.m, "Spatial elements (overrides config)");
  app.add_option("--seed", args.seed, "Seed (overrides config)");
  app.add_option("--max-iters", args.max_iters, "Iteration budget (overrides config)");
  app.add_option("--tol", args.tol, "Optimizer tolerance (overrides config)");
  app.add_option("--method", args.method, "fd_gradient or nelder_mead");
  app.add_option("--n-list", args.n_list, "Comma-separated n values (sweep)");
  app.add_flag("--print-config", args.print_config, "Echo the parsed config and exit");

  auto* forward = app.add_subcommand("forward", "Solve the state at the truth control");
  auto* invert = app.add_subcommand("invert", "Recover the control from synthetic data");
  auto* verify = app.add_subcommand("verify", "Run the invariant self-check suites");
  auto* sweep = app.add_subcommand("sweep", "Refinement sweep over run.n_list");
  for (auto* sub : {forward, invert, verify, sweep}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  RunConfig cfg;
  try {
    cfg = load_config(args.config_path);
    apply_overrides(cfg, args);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }

  if (args.print_config) {
    std::cout << config_to_json(cfg).dump(2) << "\n";
    return 0;
  }

  try {
    if (forward->parsed()) return cmd_forward(cfg);
    if (invert->parsed()) return cmd_invert(cfg);
    if (verify->parsed()) return cmd_verify(cfg);
    if (sweep->parsed()) return cmd_sweep(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
