#include "stefanopt/problem.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "stefanopt/quadrature.hpp"

namespace stefanopt {

void ProblemData::check_geometry() const {
  if (!(delta > 0.0 && delta <= s0 && s0 <= l))
    throw std::invalid_argument("require 0 < delta <= s0 <= l");
  if (!(T > 0.0)) throw std::invalid_argument("require T > 0");
  if (!(R > 0.0)) throw std::invalid_argument("require R > 0");
  if (!(a0 > 0.0)) throw std::invalid_argument("require a0 > 0");
  if (!(beta0 >= 0.0 && beta1 >= 0.0))
    throw std::invalid_argument("require beta0, beta1 >= 0");
  if (a.arity() != 2 || b.arity() != 2 || c.arity() != 2 || f.arity() != 2 ||
      gamma.arity() != 2 || chi.arity() != 2)
    throw std::invalid_argument("a, b, c, f, gamma, chi must have arity 2");
  if (phi.arity() != 1 || mu.arity() != 1 || nu.arity() != 1)
    throw std::invalid_argument("phi, mu, nu must have arity 1");
}

void ProblemData::check() const {
  check_geometry();
  if (!(beta0 + beta1 > 0.0)) throw std::invalid_argument("require beta0 + beta1 > 0");
}

namespace {

// Samples fn over the grid; appends a violation when a sample is non-finite
// or throws an evaluation-domain error.
void sample_finite(const FunctionSpec& fn, const char* label, double x_max, double t_max,
                   int samples, std::vector<Violation>& out) {
  for (int i = 0; i < samples; ++i) {
    for (int j = 0; j < samples; ++j) {
      const double x = x_max * i / (samples - 1);
      const double t = t_max * j / (samples - 1);
      double v;
      try {
        v = fn.arity() == 2 ? fn(x, t) : fn(x);
      } catch (const EvalError&) {
        out.push_back({std::string("non-finite sample: ") + label, std::nan(""), x, t});
        return;
      }
      if (!std::isfinite(v)) {
        out.push_back({std::string("non-finite sample: ") + label, v, x, t});
        return;
      }
      if (fn.arity() == 1) break;  // inner loop varies t only
    }
  }
}

}  // namespace

ValidationReport validate_data(const ProblemData& pd, int samples, double ax_cap) {
  if (samples < 2) throw std::invalid_argument("validate_data needs samples >= 2");
  ValidationReport rep;

  // Ellipticity floor of the leading coefficient.
  {
    double worst = std::numeric_limits<double>::infinity();
    double wx = 0.0, wt = 0.0;
    bool violated = false;
    for (int i = 0; i < samples; ++i) {
      for (int j = 0; j < samples; ++j) {
        const double x = pd.l * i / (samples - 1);
        const double t = pd.T * j / (samples - 1);
        double v;
        try {
          v = pd.a(x, t);
        } catch (const EvalError&) {
          continue;  // reported by the finiteness pass below
        }
        if (v < worst) {
          worst = v;
          wx = x;
          wt = t;
        }
        if (v < pd.a0) violated = true;
      }
    }
    if (violated) rep.violations.push_back({"ellipticity floor a >= a0", worst, wx, wt});
  }

  // Sampled |da/dx| cap, a finite-difference proxy for the integrability
  // assumption on the generalized derivative.
  {
    const double h = pd.l / (samples * 10.0);
    double worst = 0.0;
    double wx = 0.0, wt = 0.0;
    for (int i = 0; i < samples; ++i) {
      for (int j = 0; j < samples; ++j) {
        const double x = h + (pd.l - 2.0 * h) * i / (samples - 1);
        const double t = pd.T * j / (samples - 1);
        double dax;
        try {
          dax = std::fabs((pd.a(x + h, t) - pd.a(x - h, t)) / (2.0 * h));
        } catch (const EvalError&) {
          continue;
        }
        if (dax > worst) {
          worst = dax;
          wx = x;
          wt = t;
        }
      }
    }
    if (worst > ax_cap)
      rep.violations.push_back({"coefficient x-derivative above cap", worst, wx, wt});
  }

  sample_finite(pd.a, "a", pd.l, pd.T, samples, rep.violations);
  sample_finite(pd.b, "b", pd.l, pd.T, samples, rep.violations);
  sample_finite(pd.c, "c", pd.l, pd.T, samples, rep.violations);
  sample_finite(pd.f, "f", pd.l, pd.T, samples, rep.violations);
  sample_finite(pd.gamma, "gamma", pd.l, pd.T, samples, rep.violations);
  sample_finite(pd.chi, "chi", pd.l, pd.T, samples, rep.violations);
  sample_finite(pd.phi, "phi", pd.s0, 0.0, samples, rep.violations);
  sample_finite(pd.mu, "mu", pd.T, 0.0, samples, rep.violations);
  sample_finite(pd.nu, "nu", pd.T, 0.0, samples, rep.violations);

  rep.passed = rep.violations.empty();
  return rep;
}

double steklov_average(const FunctionSpec& fn, int k, double tau) {
  if (fn.arity() != 1) throw std::invalid_argument("steklov_average: expected arity-1 function");
  if (k < 1) throw std::invalid_argument("steklov_average: k must be >= 1");
  if (!(tau > 0.0)) throw std::invalid_argument("steklov_average: tau must be positive");
  return gauss4([&fn](double t) { return fn(t); }, (k - 1) * tau, k * tau) / tau;
}

double steklov_average(const FunctionSpec& fn, double x, int k, double tau) {
  if (fn.arity() != 2) throw std::invalid_argument("steklov_average: expected arity-2 function");
  if (k < 1) throw std::invalid_argument("steklov_average: k must be >= 1");
  if (!(tau > 0.0)) throw std::invalid_argument("steklov_average: tau must be positive");
  return gauss4([&fn, x](double t) { return fn(x, t); }, (k - 1) * tau, k * tau) / tau;
}

std::pair<double, double> trace_averages(const ContinuousControl& v, const FunctionSpec& gamma,
                                         const FunctionSpec& chi, int k, double tau) {
  if (k < 1) throw std::invalid_argument("trace_averages: k must be >= 1");
  if (!(tau > 0.0)) throw std::invalid_argument("trace_averages: tau must be positive");
  const double t0 = (k - 1) * tau;
  const double t1 = k * tau;
  const double gs =
      gauss4([&](double t) { return gamma(v.s(t), t) * v.s_deriv(t); }, t0, t1) / tau;
  const double ch = gauss4([&](double t) { return chi(v.s(t), t); }, t0, t1) / tau;
  return {gs, ch};
}

}  // namespace stefanopt
