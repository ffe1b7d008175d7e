#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "stefanopt/optimize.hpp"
#include "stefanopt/problem.hpp"

namespace stefanopt {

/// Configuration error; what() names the offending field.
class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunParams {
  int n = 16;
  int m = 32;
  int n_fine = 0;  // 0 means 4*n
  unsigned seed = 0;
  int max_iters = 200;
  double grad_step = 1e-5;
  double step0 = 1.0;
  double tol = 1e-10;
  double penalty_weight = 1.0;
  std::string method = "fd_gradient";
  std::vector<int> n_list;
  bool vary_s = true;
  bool vary_g = true;

  OptOptions opt_options() const;
};

/// Parsed configuration document. `truth` curves drive forward runs,
/// synthetic-data generation and sweeps; `init` seeds the minimization
/// (defaults: s identically s0, g identically 0).
struct RunConfig {
  ProblemData problem;
  RunParams run;
  std::optional<std::string> truth_s, truth_g;
  std::optional<std::string> init_s, init_g;
  std::string output = "out";
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
nlohmann::ordered_json config_to_json(const RunConfig& cfg);

/// Analytic control built from the configured truth curves; throws
/// ConfigError when they are missing or s(0) != s0.
ContinuousControl truth_control(const RunConfig& cfg);

/// Initial control for the minimization at the configured n.
DiscreteControl initial_control(const RunConfig& cfg, int n);

}  // namespace stefanopt
