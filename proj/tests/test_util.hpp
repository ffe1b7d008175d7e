#pragma once

#include <string>

#include "stefanopt/problem.hpp"

namespace stefanopt::testing {

struct ProblemStrings {
  std::string a = "1";
  std::string b = "0";
  std::string c = "0";
  std::string f = "0";
  std::string phi = "0";
  std::string gamma = "0";
  std::string chi = "0";
  std::string mu = "0";
  std::string nu = "0";
};

inline ProblemData make_problem(const ProblemStrings& s = {}, double a0 = 1.0, double s0 = 1.0,
                                double T = 1.0, double l = 2.0, double delta = 0.5,
                                double R = 2.0, double beta0 = 1.0, double beta1 = 1.0) {
  ProblemData pd{FunctionSpec::parse(s.a, 2),     FunctionSpec::parse(s.b, 2),
                 FunctionSpec::parse(s.c, 2),     FunctionSpec::parse(s.f, 2),
                 FunctionSpec::parse(s.phi, 1),   FunctionSpec::parse(s.gamma, 2),
                 FunctionSpec::parse(s.chi, 2),   FunctionSpec::parse(s.mu, 1),
                 FunctionSpec::parse(s.nu, 1)};
  pd.a0 = a0;
  pd.s0 = s0;
  pd.T = T;
  pd.l = l;
  pd.delta = delta;
  pd.R = R;
  pd.beta0 = beta0;
  pd.beta1 = beta1;
  return pd;
}

// The quadratic-in-x, linear-in-t exact solution family used across the
// solver tests: u = x^2 + x + 2t on s(t) = 1 + t/4 with unit diffusion.
inline ProblemData manufactured_problem() {
  ProblemStrings s;
  s.a = "1";
  s.b = "0";
  s.c = "0";
  s.f = "0";
  s.phi = "x^2 + x";
  s.gamma = "1";
  s.chi = "2*x + 1 + 1/4";
  s.mu = "(1 + t/4)^2 + (1 + t/4) + 2*t";
  s.nu = "2*t";
  return make_problem(s, 1.0, 1.0, 1.0, 2.0, 0.5, 3.0, 1.0, 1.0);
}

inline double manufactured_exact(double x, double t) { return x * x + x + 2.0 * t; }

inline ContinuousControl manufactured_truth() {
  return ContinuousControl::analytic([](double t) { return 1.0 + 0.25 * t; },
                                     [](double) { return 1.0; }, 1.0,
                                     [](double) { return 0.25; }, [](double) { return 0.0; },
                                     [](double) { return 0.0; });
}

}  // namespace stefanopt::testing
