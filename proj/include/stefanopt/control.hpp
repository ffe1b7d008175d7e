#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace stefanopt {

struct ProblemData;

/// Grid control vector: boundary positions s_k and flux values g_k at the
/// time knots t_k = k*T/n, k = 0..n.
struct DiscreteControl {
  std::vector<double> s_vals;
  std::vector<double> g_vals;
  double T = 1.0;

  static DiscreteControl make(std::vector<double> s, std::vector<double> g, double T);

  int n() const noexcept { return static_cast<int>(s_vals.size()) - 1; }
  double tau() const noexcept { return T / n(); }
  double knot(int k) const noexcept { return k * tau(); }
};

/// Squared discrete Sobolev norms built from backward difference quotients.
/// norm_w22: sum tau*s_k^2 (k=0..n-1) + sum tau*s_{tbar,k}^2 (k=1..n)
///           + sum tau*s_{tbar t,k}^2 (k=1..n-1).
/// norm_w21: sum tau*g_k^2 (k=0..n-1) + sum tau*g_{tbar,k}^2 (k=1..n).
double norm_w22(std::span<const double> s_vals, double tau);
double norm_w21(std::span<const double> g_vals, double tau);

/// C1 piecewise-quadratic interpolant of the s-values plus the piecewise
/// linear interpolant of the g-values. The s-curve starts flat on the first
/// slab and hits the midpoints (s_{k-1}+s_k)/2 at every interior knot.
class LiftCurve {
public:
  explicit LiftCurve(DiscreteControl dc);

  double s(double t) const;
  double s_deriv(double t) const;
  double s_second(double t) const;
  double g(double t) const;
  double g_deriv(double t) const;

  int n() const noexcept { return dc_.n(); }
  double tau() const noexcept { return tau_; }
  double T() const noexcept { return dc_.T; }
  double knot(int k) const noexcept { return k * tau_; }
  const DiscreteControl& control() const noexcept { return dc_; }

  // Piece-local evaluation (piece k covers [t_{k-1}, t_k], k = 1..n); used
  // to measure one-sided limits at the knots.
  double s_piece(int k, double t) const;
  double s_deriv_piece(int k, double t) const;

  int piece_of(double t) const;

private:
  DiscreteControl dc_;
  double tau_;
  std::vector<double> st_;   // s_{tbar,k}, k = 1..n at index k-1
  std::vector<double> stt_;  // s_{tbar t,k}, k = 1..n-1 at index k-1
};

/// Evaluable control pair (s, g) on [0, T], either the lift of a discrete
/// control or analytic curves supplied as callables. Derivatives default to
/// central differences (step 1e-6) when no closed form is given.
struct ContinuousControl {
  enum class Kind { lift, analytic };

  Kind kind = Kind::analytic;
  double T = 1.0;
  double s0 = 0.0;  // = s(0)
  std::function<double(double)> s, s_deriv, s_second, g, g_deriv;
  std::shared_ptr<const LiftCurve> lift;  // non-null iff kind == lift

  static ContinuousControl analytic(std::function<double(double)> s,
                                    std::function<double(double)> g, double T,
                                    std::function<double(double)> s_deriv = {},
                                    std::function<double(double)> s_second = {},
                                    std::function<double(double)> g_deriv = {});
  static ContinuousControl from_lift(const DiscreteControl& dc);
};

/// Q_n: pointwise sampling of a continuous control at the knots.
DiscreteControl sample_Qn(const ContinuousControl& v, int n);

/// P_n: lift of a discrete control to a continuous one.
ContinuousControl lift_Pn(const DiscreteControl& dc);

/// Squared continuous Sobolev norms of a control, by composite 4-point
/// Gauss-Legendre quadrature. Lift-kind curves integrate their exact
/// piecewise polynomials per knot interval; analytic curves use `panels`
/// uniform panels (default 256).
double continuous_w22_sq(const ContinuousControl& v, int panels = 0);
double continuous_w21_sq(const ContinuousControl& v, int panels = 0);

struct AdmissibilityReport {
  bool in_set = false;
  double w22_s = 0.0;
  double w21_g = 0.0;
  bool bounds_ok = false;
  bool norm_ok = false;
};

/// Membership test in the control set with radius R+epsilon (epsilon may be
/// negative to probe the shrunken set, as long as R+epsilon > 0).
AdmissibilityReport check_admissible(const DiscreteControl& dc, const ProblemData& pd,
                                     double epsilon);
AdmissibilityReport check_admissible(const ContinuousControl& v, const ProblemData& pd,
                                     double epsilon);

/// True iff max_k |s_k - s_{k-1}| <= C_cap * tau.
bool lipschitz_check(const DiscreteControl& dc, double C_cap);

}  // namespace stefanopt
