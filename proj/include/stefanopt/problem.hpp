#pragma once

#include <string>
#include <utility>
#include <vector>

#include "stefanopt/control.hpp"
#include "stefanopt/expr.hpp"

namespace stefanopt {

/// Full data set of the moving-boundary problem: coefficients of the
/// parabolic operator, initial/boundary data, geometry and the constants of
/// the admissible control set and of the cost functional.
struct ProblemData {
  FunctionSpec a, b, c, f;    // (x, t)
  FunctionSpec phi;           // (x), initial temperature on [0, s0]
  FunctionSpec gamma, chi;    // (x, t), free-boundary condition data
  FunctionSpec mu, nu;        // (t), phase-transition and fixed-boundary traces
  double a0 = 1.0;            // ellipticity floor
  double s0 = 1.0;            // initial boundary position
  double T = 1.0;             // time horizon
  double l = 2.0;             // domain width
  double delta = 0.5;         // boundary floor
  double R = 2.0;             // control-norm radius
  double beta0 = 1.0;         // fixed-boundary trace weight
  double beta1 = 1.0;         // free-boundary trace weight

  /// Throws std::invalid_argument when the scalar constants are out of
  /// range (0 < delta <= s0 <= l, T > 0, R > 0, beta0 + beta1 > 0, a0 > 0)
  /// or a coefficient has the wrong arity.
  void check() const;

  /// Same without the cost-weight rule; solver paths accept zero weights.
  void check_geometry() const;
};

struct Violation {
  std::string assumption;
  double worst = 0.0;
  double x = 0.0;
  double t = 0.0;
};

struct ValidationReport {
  bool passed = true;
  std::vector<Violation> violations;
};

/// Samples the coefficient functions on a samples x samples grid over
/// [0, l] x [0, T] and flags ellipticity-floor violations (a < a0),
/// non-finite samples, and finite-difference |da/dx| above ax_cap. The
/// derivative check is a sampled soundness warning, not an exact test.
ValidationReport validate_data(const ProblemData& pd, int samples, double ax_cap = 1e3);

/// Mean of fn over the k-th time slab [t_{k-1}, t_k], tau = slab width,
/// by 4-point Gauss-Legendre quadrature. Arity-1 overload averages fn(t);
/// the arity-2 overload averages fn(x, t) at fixed x.
double steklov_average(const FunctionSpec& fn, int k, double tau);
double steklov_average(const FunctionSpec& fn, double x, int k, double tau);

/// Slab means of the free-boundary data composed with a boundary curve:
/// first = mean of gamma(s(t), t) * s'(t), second = mean of chi(s(t), t).
std::pair<double, double> trace_averages(const ContinuousControl& v, const FunctionSpec& gamma,
                                         const FunctionSpec& chi, int k, double tau);

}  // namespace stefanopt
