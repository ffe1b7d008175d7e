#include "stefanopt/verify.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "stefanopt/analysis.hpp"
#include "stefanopt/fem.hpp"
#include "stefanopt/state.hpp"

namespace stefanopt {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct SmoothControl {
  ContinuousControl v;
  double w22 = 0.0;
  double w21 = 0.0;
};

// Random trigonometric control with exact derivative closures, rescaled so
// that max(|s|_w22^2, |g|_w21^2) equals target_sq.
SmoothControl random_smooth_control(std::mt19937& rng, double T, double target_sq) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double c0 = 1.0 + 0.5 * unit(rng);
  const double c1 = 0.3 * unit(rng);
  std::array<double, 3> as{}, bs{};
  for (auto& a : as) a = 0.2 * unit(rng);
  for (auto& b : bs) b = 0.4 * unit(rng);
  const double d0 = 0.5 * unit(rng);

  auto s = [=](double t) {
    double v = c0 + c1 * t;
    for (int j = 1; j <= 3; ++j) v += as[j - 1] * std::sin(j * kPi * t / T);
    return v;
  };
  auto sd = [=](double t) {
    double v = c1;
    for (int j = 1; j <= 3; ++j) v += as[j - 1] * (j * kPi / T) * std::cos(j * kPi * t / T);
    return v;
  };
  auto sdd = [=](double t) {
    double v = 0.0;
    for (int j = 1; j <= 3; ++j) {
      const double w = j * kPi / T;
      v -= as[j - 1] * w * w * std::sin(w * t);
    }
    return v;
  };
  auto g = [=](double t) {
    double v = d0;
    for (int j = 1; j <= 3; ++j) v += bs[j - 1] * std::cos(j * kPi * t / T);
    return v;
  };
  auto gd = [=](double t) {
    double v = 0.0;
    for (int j = 1; j <= 3; ++j) v -= bs[j - 1] * (j * kPi / T) * std::sin(j * kPi * t / T);
    return v;
  };

  ContinuousControl raw = ContinuousControl::analytic(s, g, T, sd, sdd, gd);
  const double w22 = continuous_w22_sq(raw, 128);
  const double w21 = continuous_w21_sq(raw, 128);
  const double lam = std::sqrt(target_sq / std::max(w22, w21));

  SmoothControl out{
      ContinuousControl::analytic([=](double t) { return lam * s(t); },
                                  [=](double t) { return lam * g(t); }, T,
                                  [=](double t) { return lam * sd(t); },
                                  [=](double t) { return lam * sdd(t); },
                                  [=](double t) { return lam * gd(t); }),
      lam * lam * w22, lam * lam * w21};
  return out;
}

SuiteResult suite_control_norms(const ProblemData& pd, unsigned seed) {
  SuiteResult res{"control-norms", true, ""};
  std::ostringstream msg;

  const std::vector<double> s{1.0, 1.5, 2.0};
  if (std::fabs(norm_w22(s, 0.5) - 2.625) > 1e-12) {
    res.passed = false;
    msg << "w22 hand value mismatch; ";
  }
  const std::vector<double> g{0.0, 1.0, 0.0};
  if (std::fabs(norm_w21(g, 0.5) - 4.5) > 1e-12) {
    res.passed = false;
    msg << "w21 hand value mismatch; ";
  }

  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(-2.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> seq(9);
    for (auto& v : seq) v = unit(rng);
    const double alpha = 0.25 + 2.0 * (trial % 5);
    std::vector<double> scaled(seq);
    for (auto& v : scaled) v *= alpha;
    const double base = norm_w22(seq, 0.125);
    if (std::fabs(norm_w22(scaled, 0.125) - alpha * alpha * base) >
        1e-12 * std::max(1.0, alpha * alpha * base)) {
      res.passed = false;
      msg << "w22 homogeneity failed; ";
      break;
    }
  }

  const double eps = 0.25 * pd.R;
  const double target = (pd.R - eps) * (pd.R - eps);
  for (int trial = 0; trial < 20 && res.passed; ++trial) {
    const SmoothControl sc = random_smooth_control(rng, pd.T, target);
    for (int n : {8, 32}) {
      const DiscreteControl dc = sample_Qn(sc.v, n);
      const double tau = dc.tau();
      const double bound = target + pd.R * pd.R * tau + 1e-10;
      const double have = std::max(norm_w22(dc.s_vals, tau), norm_w21(dc.g_vals, tau));
      if (have > bound) {
        res.passed = false;
        msg << "sampling inequality violated at n=" << n << " (" << have << " > " << bound
            << "); ";
        break;
      }
    }
  }

  res.detail = msg.str();
  return res;
}

SuiteResult suite_lift_regularity(const ProblemData& pd, unsigned seed) {
  SuiteResult res{"lift-regularity", true, ""};
  std::ostringstream msg;
  std::mt19937 rng(seed + 1);
  std::uniform_real_distribution<double> spos(pd.delta, pd.l);
  std::uniform_real_distribution<double> gval(-2.0, 2.0);
  std::uniform_int_distribution<int> nn(2, 24);

  for (int trial = 0; trial < 50 && res.passed; ++trial) {
    const int n = nn(rng);
    std::vector<double> s(n + 1), g(n + 1);
    for (auto& v : s) v = spos(rng);
    for (auto& v : g) v = gval(rng);
    const DiscreteControl dc = DiscreteControl::make(s, g, pd.T);
    const LiftCurve lift(dc);
    for (int k = 1; k < n; ++k) {
      const double tk = lift.knot(k);
      const double jump = std::fabs(lift.s_piece(k, tk) - lift.s_piece(k + 1, tk));
      const double djump = std::fabs(lift.s_deriv_piece(k, tk) - lift.s_deriv_piece(k + 1, tk));
      if (jump > 1e-12 || djump > 1e-12) {
        res.passed = false;
        msg << "lift not C1 at knot " << k << "; ";
        break;
      }
    }
    for (int k = 1; k <= n && res.passed; ++k) {
      const double mid = 0.5 * (dc.s_vals[k - 1] + dc.s_vals[k]);
      if (std::fabs(lift.s(lift.knot(k)) - mid) > 1e-13) {
        res.passed = false;
        msg << "lift knot value is not the sample midpoint; ";
      }
      if (lift.g(lift.knot(k)) != dc.g_vals[k]) {
        res.passed = false;
        msg << "g lift does not interpolate at the knots; ";
      }
    }
    if (lift.s(0.0) != dc.s_vals[0]) {
      res.passed = false;
      msg << "lift start value differs from s_0; ";
    }
  }
  res.detail = msg.str();
  return res;
}

SuiteResult suite_fem_oracles(unsigned seed) {
  SuiteResult res{"fem-oracles", true, ""};
  std::ostringstream msg;

  ProblemData pd{FunctionSpec::parse("1", 2),     FunctionSpec::parse("0", 2),
                 FunctionSpec::parse("0", 2),     FunctionSpec::parse("0", 2),
                 FunctionSpec::parse("0", 1),     FunctionSpec::parse("0", 2),
                 FunctionSpec::parse("0", 2),     FunctionSpec::parse("0", 1),
                 FunctionSpec::parse("0", 1)};
  pd.a0 = 1.0;
  pd.s0 = 1.0;
  pd.T = 1.0;
  pd.l = 2.0;
  pd.delta = 0.5;
  pd.R = 2.0;

  // Hand-assembled 3x3: stiffness(h = 0.5) + mass(h = 0.5) / tau.
  {
    const double tau = 0.1, h = 0.5;
    const StepSystem sys =
        assemble_step(pd, 1, 1.0, 2, tau, [](double) { return 0.0; }, 0.0, 0.0, 0.0);
    const double d_end = 1.0 / h + 2.0 * h / (6.0 * tau);
    const double d_mid = 2.0 / h + 4.0 * h / (6.0 * tau);
    const double off = -1.0 / h + h / (6.0 * tau);
    const double tol = 1e-12 * (1.0 / tau);
    if (std::fabs(sys.diag[0] - d_end) > tol || std::fabs(sys.diag[1] - d_mid) > tol ||
        std::fabs(sys.diag[2] - d_end) > tol || std::fabs(sys.super[0] - off) > tol ||
        std::fabs(sys.sub[1] - off) > tol) {
      res.passed = false;
      msg << "hand 3x3 assembly mismatch; ";
    }
  }

  // Zero data solves to zero below the uniqueness threshold.
  {
    const double tau0 = stability_threshold(1.0, 1.0);
    const StepSystem sys = assemble_step(pd, 1, 1.0, 8, 0.5 * tau0,
                                         [](double) { return 0.0; }, 0.0, 0.0, 0.0);
    const std::vector<double> u = solve_step(sys);
    for (double v : u)
      if (std::fabs(v) > 1e-12) {
        res.passed = false;
        msg << "zero-data step is not zero; ";
        break;
      }
  }

  // One-step refinement order h^2 against z(x) = sin(x).
  {
    const double tau = 0.5;
    auto z = [](double x) { return std::sin(x); };
    auto u_prev = [tau, z](double x) { return (1.0 + tau) * z(x); };
    std::vector<double> errs;
    for (int m : {8, 16, 32, 64}) {
      const StepSystem sys =
          assemble_step(pd, 1, 1.0, m, tau, u_prev, -std::cos(1.0), 0.0, 1.0);
      const std::vector<double> u = solve_step(sys);
      double err2 = 0.0;
      for (int i = 0; i <= m; ++i) {
        const double d = u[i] - z(sys.mesh.nodes[i]);
        err2 += d * d * sys.mesh.h();
      }
      errs.push_back(std::sqrt(err2));
    }
    for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
      const double ratio = errs[i] / errs[i + 1];
      if (ratio < 3.4 || ratio > 4.6) {
        res.passed = false;
        msg << "one-step refinement ratio " << ratio << " outside [3.4, 4.6]; ";
      }
    }
  }

  // Thomas path agrees with the dense fallback on random diagonally
  // dominant systems, exercised through the public solve.
  {
    std::mt19937 rng(seed + 2);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
      StepSystem sys;
      const int size = 12;
      sys.mesh = Mesh1D::uniform(1.0, size - 1);
      sys.sub.assign(size, 0.0);
      sys.diag.assign(size, 0.0);
      sys.super.assign(size, 0.0);
      sys.rhs.assign(size, 0.0);
      for (int i = 0; i < size; ++i) {
        sys.sub[i] = unit(rng);
        sys.super[i] = unit(rng);
        sys.diag[i] = 4.0 + unit(rng);
        sys.rhs[i] = unit(rng);
      }
      sys.sub[0] = 0.0;
      sys.super[size - 1] = 0.0;
      const std::vector<double> u = solve_step(sys);
      if (residual_inf(sys, u) > 1e-10 * 2.0) {
        res.passed = false;
        msg << "random tridiagonal residual too large; ";
        break;
      }
    }
  }

  res.detail = msg.str();
  return res;
}

SuiteResult suite_reflection_bounds(const ProblemData& pd, unsigned seed) {
  SuiteResult res{"reflection-bounds", true, ""};
  std::ostringstream msg;
  std::mt19937 rng(seed + 3);
  std::uniform_real_distribution<double> spos(pd.delta, pd.l);
  std::uniform_real_distribution<double> uval(-1.0, 1.0);
  const int N = max_reflections(pd.l, pd.delta);
  const double factor = std::pow(2.0, N);

  for (int trial = 0; trial < 20 && res.passed; ++trial) {
    StateSlice slice;
    slice.k = 1;
    slice.s_k = std::min(spos(rng), pd.l);
    slice.mesh = Mesh1D::uniform(slice.s_k, 16);
    slice.nodal.resize(17);
    for (auto& v : slice.nodal) v = uval(rng);

    const double inner = extended_l2_sq(slice, 0.0, slice.s_k, pd.l, pd.delta);
    const double outer = extended_l2_sq(slice, 0.0, pd.l, pd.l, pd.delta);
    if (outer > factor * inner * (1.0 + 1e-12)) {
      res.passed = false;
      msg << "extension energy bound violated (" << outer << " > 2^" << N << " * " << inner
          << "); ";
    }
    for (int i = 0; i <= 50; ++i) {
      const double x = pd.l * i / 50.0;
      int folds = 0;
      extend_eval_counted(slice, x, pd.l, pd.delta, folds);
      if (folds > N) {
        res.passed = false;
        msg << "fold depth " << folds << " exceeds " << N << "; ";
        break;
      }
    }
  }
  res.detail = msg.str();
  return res;
}

}  // namespace

std::vector<SuiteResult> run_verify_suites(const ProblemData& pd, unsigned seed) {
  std::vector<SuiteResult> out;
  out.push_back(suite_control_norms(pd, seed));
  out.push_back(suite_lift_regularity(pd, seed));
  out.push_back(suite_fem_oracles(seed));
  out.push_back(suite_reflection_bounds(pd, seed));
  return out;
}

}  // namespace stefanopt
