#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "stefanopt/analysis.hpp"
#include "stefanopt/state.hpp"
#include "test_util.hpp"

using namespace stefanopt;
using stefanopt::testing::make_problem;
using stefanopt::testing::manufactured_exact;
using stefanopt::testing::manufactured_problem;
using stefanopt::testing::manufactured_truth;
using stefanopt::testing::ProblemStrings;

namespace {

StateSlice linear_slice(double s_k, int m, const std::function<double(double)>& fn) {
  StateSlice slice;
  slice.k = 1;
  slice.s_k = s_k;
  slice.mesh = Mesh1D::uniform(s_k, m);
  slice.nodal.resize(m + 1);
  for (int i = 0; i <= m; ++i) slice.nodal[i] = fn(slice.mesh.nodes[i]);
  return slice;
}

}  // namespace

TEST_CASE("reflection folds into the base interval") {
  const StateSlice slice = linear_slice(1.0, 10, [](double x) { return x; });
  // One fold about 1: 2 - 1.5 = 0.5.
  CHECK(extend_eval(slice, 1.5, 4.0, 0.5) == doctest::Approx(0.5).epsilon(1e-14));
  // x = 3 lies in [2, 4]: image 4 - 3 = 1, the interval endpoint.
  CHECK(extend_eval(slice, 3.0, 4.0, 0.5) == doctest::Approx(1.0).epsilon(1e-14));
  // Inside [0, s_k] nothing happens.
  CHECK(extend_eval(slice, 0.73, 4.0, 0.5) == doctest::Approx(0.73).epsilon(1e-14));
  CHECK_THROWS_AS(extend_eval(slice, 5.0, 4.0, 0.5), std::invalid_argument);
}

TEST_CASE("fold count stays within the reflection budget") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> spos(0.5, 2.0);
  const double l = 2.0, delta = 0.5;
  const int N = max_reflections(l, delta);
  CHECK(N == 3);
  for (int trial = 0; trial < 30; ++trial) {
    const StateSlice slice = linear_slice(spos(rng), 8, [](double x) { return std::cos(x); });
    for (int i = 0; i <= 200; ++i) {
      int folds = 0;
      extend_eval_counted(slice, l * i / 200.0, l, delta, folds);
      CHECK(folds <= N);
    }
  }
}

TEST_CASE("extension energy bound with factor 2^N") {
  std::mt19937 rng(6);
  std::uniform_real_distribution<double> spos(0.5, 2.0);
  std::uniform_real_distribution<double> uval(-1.0, 1.0);
  const double l = 2.0, delta = 0.5;
  const double factor = std::pow(2.0, max_reflections(l, delta));
  for (int trial = 0; trial < 30; ++trial) {
    StateSlice slice = linear_slice(spos(rng), 12, [&](double) { return uval(rng); });
    const double inner = extended_l2_sq(slice, 0.0, slice.s_k, l, delta);
    const double outer = extended_l2_sq(slice, 0.0, l, l, delta);
    CHECK(outer <= factor * inner * (1.0 + 1e-12));
  }
}

TEST_CASE("constant solution is reproduced exactly") {
  ProblemStrings s;
  s.phi = "2.5";
  const ProblemData pd = make_problem(s);
  auto rising = ContinuousControl::analytic([](double t) { return 1.0 + 0.3 * t; },
                                            [](double) { return 0.0; }, 1.0);
  const DiscreteControl dc = sample_Qn(rising, 8);
  const DiscreteStateVector dsv = solve_state(dc, pd, 16);
  for (const StateSlice& slice : dsv.slices)
    for (double v : slice.nodal) CHECK(v == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("zero data gives the zero state") {
  const ProblemData pd = make_problem();
  const DiscreteControl dc = DiscreteControl::make(std::vector<double>(9, 1.0),
                                                   std::vector<double>(9, 0.0), pd.T);
  const DiscreteStateVector dsv = solve_state(dc, pd, 16);
  for (const StateSlice& slice : dsv.slices)
    for (double v : slice.nodal) CHECK(std::fabs(v) <= 1e-12);
}

TEST_CASE("manufactured solution error shrinks under refinement") {
  const ProblemData pd = manufactured_problem();
  const ContinuousControl truth = manufactured_truth();

  auto max_node_error = [&](int n, int m) {
    const DiscreteControl dc = sample_Qn(truth, n);
    const DiscreteStateVector dsv = solve_state(dc, pd, m);
    double err = 0.0;
    for (int k = 0; k <= n; ++k) {
      const StateSlice& slice = dsv.slices[k];
      for (int i = 0; i <= slice.mesh.m(); ++i) {
        const double exact = manufactured_exact(slice.mesh.nodes[i], k * dsv.tau);
        err = std::max(err, std::fabs(slice.nodal[i] - exact));
      }
    }
    return err;
  };

  const double e8 = max_node_error(8, 16);
  const double e16 = max_node_error(16, 32);
  CHECK(e16 < e8);
  CHECK(e16 < 0.08);  // measured 0.055 at this resolution
}

TEST_CASE("manufactured variant with advection, reaction and scaled gamma") {
  // Same exact solution u = x^2 + x + 2t on s(t) = 1 + t/4, now with
  // b = 1, c = 1/2 and gamma = 2, so
  //   f = u_xx + b u_x + c u - u_t = 0.5 x^2 + 2.5 x + 1 + t
  //   chi = u_x(s) + gamma s' = 2x + 1.5 at x = s(t).
  ProblemStrings ps;
  ps.a = "1";
  ps.b = "1";
  ps.c = "0.5";
  ps.f = "0.5*x^2 + 2.5*x + 1 + t";
  ps.phi = "x^2 + x";
  ps.gamma = "2";
  ps.chi = "2*x + 1.5";
  ps.mu = "(1 + t/4)^2 + (1 + t/4) + 2*t";
  ps.nu = "2*t";
  const ProblemData pd = make_problem(ps, 1.0, 1.0, 1.0, 2.0, 0.5, 3.0);
  const ContinuousControl truth = manufactured_truth();

  auto max_err = [&](int n, int m) {
    const DiscreteControl dc = sample_Qn(truth, n);
    const DiscreteStateVector dsv = solve_state(dc, pd, m);
    double err = 0.0;
    for (int k = 0; k <= n; ++k)
      for (int i = 0; i <= m; ++i)
        err = std::max(err, std::fabs(dsv.slices[k].nodal[i] -
                                      manufactured_exact(dsv.slices[k].mesh.nodes[i],
                                                         k * dsv.tau)));
    return err;
  };
  const double e8 = max_err(8, 16);
  const double e16 = max_err(16, 32);
  const double e32 = max_err(32, 64);
  CHECK(e16 < e8);
  CHECK(e32 < e16);
  CHECK(e32 < 0.1);
}

TEST_CASE("error against the exact solution matches a fine numerical reference") {
  const ProblemData pd = manufactured_problem();
  const ContinuousControl truth = manufactured_truth();

  const DiscreteControl dc = sample_Qn(truth, 16);
  const DiscreteStateVector coarse = solve_state(dc, pd, 32);
  const DiscreteStateVector fine = solve_state(sample_Qn(truth, 128), pd, 256);

  // Shared knots (8x in time and space), so the reference is evaluated at
  // the coarse nodes without interpolation error.
  double err_exact = 0.0, err_ref = 0.0;
  for (int k = 0; k <= 16; ++k) {
    const StateSlice& slice = coarse.slices[k];
    const StateSlice& ref = fine.slices[8 * k];
    for (int i = 0; i <= slice.mesh.m(); ++i) {
      const double x = slice.mesh.nodes[i];
      err_exact = std::max(err_exact,
                           std::fabs(slice.nodal[i] - manufactured_exact(x, k * coarse.tau)));
      err_ref = std::max(err_ref, std::fabs(slice.nodal[i] - ref.nodal[8 * i]));
    }
  }
  CHECK(err_exact == doctest::Approx(err_ref).epsilon(0.25));
}

TEST_CASE("interpolants agree at the knots and average in between") {
  ProblemStrings s;
  s.phi = "x";
  s.gamma = "1";
  s.chi = "0.25";  // u = x stationary: u_x(s) + s' * 1 = 1 + 0.25
  s.mu = "1 + t/4";
  s.nu = "0";
  const ProblemData pd = make_problem(s);
  auto truth = manufactured_truth();
  const DiscreteControl dc = [&] {
    DiscreteControl d = sample_Qn(truth, 8);
    for (auto& g : d.g_vals) g = 1.0;  // u_x(0) = 1
    return d;
  }();
  const DiscreteStateVector dsv = solve_state(dc, pd, 16);

  for (int k = 0; k <= dsv.n(); ++k) {
    const double tk = k * dsv.tau;
    for (double x : {0.0, 0.4, 0.9, 1.4}) {
      const double c = eval_interpolant(dsv, x, tk, InterpMode::constant);
      const double lin = eval_interpolant(dsv, x, tk, InterpMode::linear);
      CHECK(std::fabs(c - lin) <= 1e-13);
    }
  }

  // Midpoint of a slab averages the two neighbouring slices.
  const double tmid = 2.5 * dsv.tau;
  for (double x : {0.0, 0.5, 1.0}) {
    const double lin = eval_interpolant(dsv, x, tmid, InterpMode::linear);
    const double lo = extend_eval(dsv.slices[2], x, pd.l, pd.delta);
    const double hi = extend_eval(dsv.slices[3], x, pd.l, pd.delta);
    CHECK(lin == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-13));
  }

  // Beyond the horizon the linear mode clamps to the last slice.
  CHECK(eval_interpolant(dsv, 0.5, pd.T + 3.0, InterpMode::linear) ==
        doctest::Approx(extend_eval(dsv.slices[dsv.n()], 0.5, pd.l, pd.delta)).epsilon(1e-14));
}

TEST_CASE("random smooth problems march to finite states") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    ProblemStrings ps;
    auto num = [&](double scale) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.6f", scale * unit(rng));
      return std::string(buf);
    };
    ps.a = "1.5 + " + num(0.4) + "*sin(x)*cos(t)";
    ps.b = num(0.5) + "*x";
    ps.c = num(0.5) + "*cos(x*t)";
    ps.f = num(1.0) + "*(x + t)";
    ps.phi = "1 + " + num(0.5) + "*x^2";
    ps.gamma = "0.5 + " + num(0.3) + "*x";
    ps.chi = num(1.0) + " + " + num(0.5) + "*t";
    const ProblemData pd = make_problem(ps);

    const double drift = 0.3 * unit(rng);
    const double glev = unit(rng);
    auto v = ContinuousControl::analytic(
        [drift](double t) { return 1.0 + drift * t; },
        [glev](double t) { return glev * (1.0 - t); }, pd.T,
        [drift](double) { return drift; });
    const DiscreteControl dc = sample_Qn(v, 10);
    const DiscreteStateVector dsv = solve_state(dc, pd, 20);
    for (const StateSlice& slice : dsv.slices)
      for (double u : slice.nodal) CHECK(std::isfinite(u));
    const EnergyReport er = energy_report(dsv, dc, pd);
    CHECK(std::isfinite(er.lhs_first));
    CHECK(std::isfinite(er.ratio));
  }
}

TEST_CASE("constant state interpolates to the constant everywhere") {
  ProblemStrings s;
  s.phi = "1.5";
  const ProblemData pd = make_problem(s);
  const DiscreteControl dc = DiscreteControl::make(std::vector<double>(5, 1.0),
                                                   std::vector<double>(5, 0.0), pd.T);
  const DiscreteStateVector dsv = solve_state(dc, pd, 8);
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> xs(0.0, pd.l), ts(0.0, pd.T);
  for (int i = 0; i < 50; ++i) {
    CHECK(eval_interpolant(dsv, xs(rng), ts(rng), InterpMode::constant) ==
          doctest::Approx(1.5).epsilon(1e-12));
    CHECK(eval_interpolant(dsv, xs(rng), ts(rng), InterpMode::linear) ==
          doctest::Approx(1.5).epsilon(1e-12));
  }
}
