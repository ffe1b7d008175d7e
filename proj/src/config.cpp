#include "stefanopt/config.hpp"

#include <cmath>
#include <fstream>

namespace stefanopt {

namespace {

const nlohmann::json& require_field(const nlohmann::json& j, const std::string& section,
                                    const std::string& key) {
  if (!j.contains(key)) throw ConfigError("missing config field: " + section + "." + key);
  return j.at(key);
}

double require_number(const nlohmann::json& j, const std::string& section,
                      const std::string& key) {
  const auto& v = require_field(j, section, key);
  if (!v.is_number()) throw ConfigError("config field is not a number: " + section + "." + key);
  return v.get<double>();
}

std::string require_string(const nlohmann::json& j, const std::string& section,
                           const std::string& key) {
  const auto& v = require_field(j, section, key);
  if (!v.is_string()) throw ConfigError("config field is not a string: " + section + "." + key);
  return v.get<std::string>();
}

FunctionSpec parse_field(const nlohmann::json& j, const std::string& section,
                         const std::string& key, int arity) {
  const std::string text = require_string(j, section, key);
  try {
    return FunctionSpec::parse(text, arity);
  } catch (const ParseError& e) {
    throw ConfigError("config field " + section + "." + key + ": " + e.what());
  }
}

template <class T>
void read_optional(const nlohmann::json& j, const std::string& key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

OptOptions RunParams::opt_options() const {
  OptOptions o;
  o.max_iters = max_iters;
  o.grad_step = grad_step;
  o.step0 = step0;
  o.tol = tol;
  o.penalty_weight = penalty_weight;
  if (method == "fd_gradient")
    o.method = OptMethod::fd_gradient;
  else if (method == "nelder_mead")
    o.method = OptMethod::nelder_mead;
  else
    throw ConfigError("run.method must be fd_gradient or nelder_mead");
  o.seed = seed;
  o.vary_s = vary_s;
  o.vary_g = vary_g;
  return o;
}

RunConfig parse_config(const nlohmann::json& j) {
  if (!j.contains("problem")) throw ConfigError("missing config section: problem");
  const auto& p = j.at("problem");

  ProblemData pd{
      parse_field(p, "problem", "a", 2),     parse_field(p, "problem", "b", 2),
      parse_field(p, "problem", "c", 2),     parse_field(p, "problem", "f", 2),
      parse_field(p, "problem", "phi", 1),   parse_field(p, "problem", "gamma", 2),
      parse_field(p, "problem", "chi", 2),   parse_field(p, "problem", "mu", 1),
      parse_field(p, "problem", "nu", 1),
  };
  pd.a0 = require_number(p, "problem", "a0");
  pd.s0 = require_number(p, "problem", "s0");
  pd.T = require_number(p, "problem", "T");
  pd.l = require_number(p, "problem", "l");
  pd.delta = require_number(p, "problem", "delta");
  pd.R = require_number(p, "problem", "R");
  pd.beta0 = require_number(p, "problem", "beta0");
  pd.beta1 = require_number(p, "problem", "beta1");
  try {
    pd.check();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("problem constants out of range: ") + e.what());
  }

  RunConfig cfg{std::move(pd), RunParams{}, {}, {}, {}, {}, "out"};

  if (j.contains("run")) {
    const auto& r = j.at("run");
    read_optional(r, "n", cfg.run.n);
    read_optional(r, "m", cfg.run.m);
    read_optional(r, "n_fine", cfg.run.n_fine);
    read_optional(r, "seed", cfg.run.seed);
    read_optional(r, "max_iters", cfg.run.max_iters);
    read_optional(r, "grad_step", cfg.run.grad_step);
    read_optional(r, "step0", cfg.run.step0);
    read_optional(r, "tol", cfg.run.tol);
    read_optional(r, "penalty_weight", cfg.run.penalty_weight);
    read_optional(r, "method", cfg.run.method);
    read_optional(r, "n_list", cfg.run.n_list);
    read_optional(r, "vary_s", cfg.run.vary_s);
    read_optional(r, "vary_g", cfg.run.vary_g);
  }
  if (cfg.run.n < 1) throw ConfigError("run.n must be >= 1");
  if (cfg.run.m < 2) throw ConfigError("run.m must be >= 2");
  if (cfg.run.n_fine == 0) cfg.run.n_fine = 4 * cfg.run.n;
  if (cfg.run.method != "fd_gradient" && cfg.run.method != "nelder_mead")
    throw ConfigError("run.method must be fd_gradient or nelder_mead");

  if (j.contains("truth")) {
    const auto& t = j.at("truth");
    if (t.contains("s_expr")) {
      cfg.truth_s = require_string(t, "truth", "s_expr");
      FunctionSpec::parse(*cfg.truth_s, 1);  // validate now
    }
    if (t.contains("g_expr")) {
      cfg.truth_g = require_string(t, "truth", "g_expr");
      FunctionSpec::parse(*cfg.truth_g, 1);
    }
  }
  if (j.contains("init")) {
    const auto& t = j.at("init");
    if (t.contains("s_expr")) {
      cfg.init_s = require_string(t, "init", "s_expr");
      FunctionSpec::parse(*cfg.init_s, 1);
    }
    if (t.contains("g_expr")) {
      cfg.init_g = require_string(t, "init", "g_expr");
      FunctionSpec::parse(*cfg.init_g, 1);
    }
  }
  read_optional(j, "output", cfg.output);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return parse_config(j);
}

nlohmann::ordered_json config_to_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["problem"] = {
      {"a", cfg.problem.a.source()},       {"b", cfg.problem.b.source()},
      {"c", cfg.problem.c.source()},       {"f", cfg.problem.f.source()},
      {"phi", cfg.problem.phi.source()},   {"gamma", cfg.problem.gamma.source()},
      {"chi", cfg.problem.chi.source()},   {"mu", cfg.problem.mu.source()},
      {"nu", cfg.problem.nu.source()},     {"a0", cfg.problem.a0},
      {"s0", cfg.problem.s0},              {"T", cfg.problem.T},
      {"l", cfg.problem.l},                {"delta", cfg.problem.delta},
      {"R", cfg.problem.R},                {"beta0", cfg.problem.beta0},
      {"beta1", cfg.problem.beta1},
  };
  j["run"] = {
      {"n", cfg.run.n},
      {"m", cfg.run.m},
      {"n_fine", cfg.run.n_fine},
      {"seed", cfg.run.seed},
      {"max_iters", cfg.run.max_iters},
      {"grad_step", cfg.run.grad_step},
      {"step0", cfg.run.step0},
      {"tol", cfg.run.tol},
      {"penalty_weight", cfg.run.penalty_weight},
      {"method", cfg.run.method},
      {"n_list", cfg.run.n_list},
      {"vary_s", cfg.run.vary_s},
      {"vary_g", cfg.run.vary_g},
  };
  if (cfg.truth_s || cfg.truth_g) {
    nlohmann::ordered_json t;
    if (cfg.truth_s) t["s_expr"] = *cfg.truth_s;
    if (cfg.truth_g) t["g_expr"] = *cfg.truth_g;
    j["truth"] = t;
  }
  if (cfg.init_s || cfg.init_g) {
    nlohmann::ordered_json t;
    if (cfg.init_s) t["s_expr"] = *cfg.init_s;
    if (cfg.init_g) t["g_expr"] = *cfg.init_g;
    j["init"] = t;
  }
  j["output"] = cfg.output;
  return j;
}

ContinuousControl truth_control(const RunConfig& cfg) {
  if (!cfg.truth_s || !cfg.truth_g)
    throw ConfigError("truth.s_expr and truth.g_expr are required for this command");
  const FunctionSpec s = FunctionSpec::parse(*cfg.truth_s, 1);
  const FunctionSpec g = FunctionSpec::parse(*cfg.truth_g, 1);
  ContinuousControl v = ContinuousControl::analytic([s](double t) { return s(t); },
                                                    [g](double t) { return g(t); }, cfg.problem.T);
  if (std::fabs(v.s0 - cfg.problem.s0) > 1e-9)
    throw ConfigError("truth.s_expr does not satisfy s(0) = s0");
  return v;
}

DiscreteControl initial_control(const RunConfig& cfg, int n) {
  std::vector<double> s(n + 1, cfg.problem.s0), g(n + 1, 0.0);
  const double tau = cfg.problem.T / n;
  if (cfg.init_s) {
    const FunctionSpec fs = FunctionSpec::parse(*cfg.init_s, 1);
    for (int k = 0; k <= n; ++k) s[k] = fs(k * tau);
  }
  if (cfg.init_g) {
    const FunctionSpec fg = FunctionSpec::parse(*cfg.init_g, 1);
    for (int k = 0; k <= n; ++k) g[k] = fg(k * tau);
  }
  return DiscreteControl::make(std::move(s), std::move(g), cfg.problem.T);
}

}  // namespace stefanopt
