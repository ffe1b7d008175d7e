#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "stefanopt/problem.hpp"
#include "stefanopt/quadrature.hpp"
#include "test_util.hpp"

using namespace stefanopt;
using stefanopt::testing::make_problem;
using stefanopt::testing::ProblemStrings;

TEST_CASE("steklov average of simple functions") {
  const auto c = FunctionSpec::parse("3.25", 1);
  for (int k = 1; k <= 4; ++k)
    CHECK(steklov_average(c, k, 0.25) == doctest::Approx(3.25).epsilon(1e-15));

  // Linear function over [0.5, 1.0]: midpoint value 0.75.
  const auto lin = FunctionSpec::parse("t", 1);
  CHECK(steklov_average(lin, 2, 0.5) == doctest::Approx(0.75).epsilon(1e-14));

  // t^2 over [0.5, 1.0]: 2 * (t^3/3) | = 2*(1/3 - 1/24) = 7/12.
  const auto quad = FunctionSpec::parse("t^2", 1);
  CHECK(steklov_average(quad, 2, 0.5) == doctest::Approx(7.0 / 12.0).epsilon(1e-14));

  // Arity-2 overload averages in t at fixed x.
  const auto xt = FunctionSpec::parse("x*t", 2);
  CHECK(steklov_average(xt, 2.0, 2, 0.5) == doctest::Approx(1.5).epsilon(1e-14));
}

TEST_CASE("steklov averaging is linear and exact for degree <= 7") {
  const auto f1 = FunctionSpec::parse("t^2 + 1", 1);
  const auto f2 = FunctionSpec::parse("sin(t)", 1);
  const auto combo = FunctionSpec::parse("2.5*(t^2 + 1) - 0.75*sin(t)", 1);
  for (int k = 1; k <= 3; ++k) {
    const double lhs = steklov_average(combo, k, 0.3);
    const double rhs = 2.5 * steklov_average(f1, k, 0.3) - 0.75 * steklov_average(f2, k, 0.3);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
  }

  // Degree-7 polynomial: 4-point Gauss is exact. Exact slab mean of t^7 on
  // [t0, t1] is (t1^8 - t0^8) / (8 tau).
  const auto p7 = FunctionSpec::parse("t^7 - 3*t^4 + t", 1);
  const double tau = 0.4;
  for (int k = 1; k <= 3; ++k) {
    const double t0 = (k - 1) * tau, t1 = k * tau;
    const double exact = (std::pow(t1, 8) - std::pow(t0, 8)) / (8 * tau) -
                         3 * (std::pow(t1, 5) - std::pow(t0, 5)) / (5 * tau) +
                         (t1 * t1 - t0 * t0) / (2 * tau);
    CHECK(steklov_average(p7, k, tau) == doctest::Approx(exact).epsilon(1e-13));
  }
}

TEST_CASE("trace averages along a boundary curve") {
  const auto gamma2 = FunctionSpec::parse("2", 2);
  const auto chi0 = FunctionSpec::parse("0", 2);
  auto v = ContinuousControl::analytic([](double t) { return 1.0 + 0.25 * t; },
                                       [](double) { return 0.0; }, 1.0,
                                       [](double) { return 0.25; });
  for (int k = 1; k <= 4; ++k) {
    const auto [gs, ch] = trace_averages(v, gamma2, chi0, k, 0.25);
    CHECK(gs == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(ch == 0.0);
  }

  // gamma(x,t) = x with s(t) = 1 + t on the first slab: mean of (1 + t).
  const auto gx = FunctionSpec::parse("x", 2);
  auto w = ContinuousControl::analytic([](double t) { return 1.0 + t; },
                                       [](double) { return 0.0; }, 1.0,
                                       [](double) { return 1.0; });
  const double tau = 0.25;
  const auto [gs1, ch1] = trace_averages(w, gx, chi0, 1, tau);
  CHECK(gs1 == doctest::Approx(1.0 + tau / 2.0).epsilon(1e-13));
  CHECK(ch1 == 0.0);
}

TEST_CASE("trace average with unit gamma telescopes to the slab slope") {
  // Cubic boundary: the quadrature integrates s' exactly, so the mean is
  // the difference quotient of the endpoints.
  auto cubic = ContinuousControl::analytic(
      [](double t) { return 1.0 + 0.2 * t + 0.1 * t * t - 0.05 * t * t * t; },
      [](double) { return 0.0; }, 1.0,
      [](double t) { return 0.2 + 0.2 * t - 0.15 * t * t; });
  const auto gamma1 = FunctionSpec::parse("1", 2);
  const auto chi0 = FunctionSpec::parse("0", 2);
  const double tau = 0.2;
  for (int k = 1; k <= 5; ++k) {
    const auto [gs, ch] = trace_averages(cubic, gamma1, chi0, k, tau);
    const double expect = (cubic.s(k * tau) - cubic.s((k - 1) * tau)) / tau;
    CHECK(gs == doctest::Approx(expect).epsilon(1e-12));
    CHECK(ch == 0.0);
  }
}

TEST_CASE("validate_data flags the documented violations") {
  CHECK(validate_data(make_problem(), 16).passed);

  ProblemStrings low;
  low.a = "0.5";
  const auto rep = validate_data(make_problem(low), 8);
  CHECK_FALSE(rep.passed);
  bool found = false;
  for (const auto& v : rep.violations)
    if (v.assumption.find("ellipticity") != std::string::npos) {
      found = true;
      CHECK(v.worst == doctest::Approx(0.5));
    }
  CHECK(found);

  ProblemStrings sing;
  sing.f = "1/(x - 0.5)";
  const auto rep2 = validate_data(make_problem(sing), 9);
  CHECK_FALSE(rep2.passed);
  bool nonfinite = false;
  for (const auto& v : rep2.violations)
    if (v.assumption.find("non-finite") != std::string::npos) nonfinite = true;
  CHECK(nonfinite);

  ProblemStrings steep;
  steep.a = "2 + 10000*x";  // da/dx = 1e4 above the cap
  const auto rep3 = validate_data(make_problem(steep), 12, 1e3);
  CHECK_FALSE(rep3.passed);
  bool capped = false;
  for (const auto& v : rep3.violations)
    if (v.assumption.find("derivative") != std::string::npos) capped = true;
  CHECK(capped);
}

TEST_CASE("problem constant invariants") {
  ProblemData pd = make_problem();
  CHECK_NOTHROW(pd.check());
  pd.delta = 1.5;  // above s0
  CHECK_THROWS_AS(pd.check(), std::invalid_argument);
  pd = make_problem();
  pd.beta0 = 0.0;
  pd.beta1 = 0.0;
  CHECK_NOTHROW(pd.check_geometry());
  CHECK_THROWS_AS(pd.check(), std::invalid_argument);
}

TEST_CASE("gauss weights are consistent") {
  double w2 = kGauss2W[0] + kGauss2W[1];
  double w4 = kGauss4W[0] + kGauss4W[1] + kGauss4W[2] + kGauss4W[3];
  CHECK(w2 == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(w4 == doctest::Approx(2.0).epsilon(1e-15));
}
