#include "stefanopt/control.hpp"

#include <cmath>
#include <stdexcept>

#include "stefanopt/problem.hpp"
#include "stefanopt/quadrature.hpp"

namespace stefanopt {

namespace {
constexpr double kFdStep = 1e-6;
}

DiscreteControl DiscreteControl::make(std::vector<double> s, std::vector<double> g, double T) {
  if (s.size() != g.size()) throw std::invalid_argument("s_vals and g_vals lengths differ");
  if (s.size() < 2) throw std::invalid_argument("discrete control needs at least n = 1");
  if (!(T > 0.0)) throw std::invalid_argument("horizon T must be positive");
  for (double v : s)
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite entry in s_vals");
  for (double v : g)
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite entry in g_vals");
  return DiscreteControl{std::move(s), std::move(g), T};
}

double norm_w22(std::span<const double> s, double tau) {
  if (s.size() < 2) throw std::invalid_argument("norm_w22 needs at least two values");
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  const int n = static_cast<int>(s.size()) - 1;
  double sum = 0.0;
  for (int k = 0; k < n; ++k) sum += tau * s[k] * s[k];
  for (int k = 1; k <= n; ++k) {
    const double dt = (s[k] - s[k - 1]) / tau;
    sum += tau * dt * dt;
  }
  for (int k = 1; k <= n - 1; ++k) {
    const double dtt = (s[k + 1] - 2.0 * s[k] + s[k - 1]) / (tau * tau);
    sum += tau * dtt * dtt;
  }
  return sum;
}

double norm_w21(std::span<const double> g, double tau) {
  if (g.size() < 2) throw std::invalid_argument("norm_w21 needs at least two values");
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  const int n = static_cast<int>(g.size()) - 1;
  double sum = 0.0;
  for (int k = 0; k < n; ++k) sum += tau * g[k] * g[k];
  for (int k = 1; k <= n; ++k) {
    const double dt = (g[k] - g[k - 1]) / tau;
    sum += tau * dt * dt;
  }
  return sum;
}

LiftCurve::LiftCurve(DiscreteControl dc) : dc_(std::move(dc)), tau_(dc_.tau()) {
  const int n = dc_.n();
  if (n < 1) throw std::invalid_argument("lift needs n >= 1");
  st_.resize(n);
  for (int k = 1; k <= n; ++k) st_[k - 1] = (dc_.s_vals[k] - dc_.s_vals[k - 1]) / tau_;
  stt_.resize(n > 1 ? n - 1 : 0);
  for (int k = 1; k <= n - 1; ++k)
    stt_[k - 1] = (dc_.s_vals[k + 1] - 2.0 * dc_.s_vals[k] + dc_.s_vals[k - 1]) / (tau_ * tau_);
}

int LiftCurve::piece_of(double t) const {
  const int n = dc_.n();
  if (t <= 0.0) return 1;
  if (t >= T()) return n;
  int k = static_cast<int>(std::ceil(t / tau_));
  if (k < 1) k = 1;
  if (k > n) k = n;
  while (k > 1 && t <= knot(k - 1)) --k;
  while (k < n && t > knot(k)) ++k;
  return k;
}

double LiftCurve::s_piece(int k, double t) const {
  if (k == 1) {
    return dc_.s_vals[0] + t * t / (2.0 * tau_) * st_[0];
  }
  const double dt = t - knot(k - 1);
  return dc_.s_vals[k - 1] + (dt - 0.5 * tau_) * st_[k - 2] + 0.5 * dt * dt * stt_[k - 2];
}

double LiftCurve::s_deriv_piece(int k, double t) const {
  if (k == 1) return t / tau_ * st_[0];
  const double dt = t - knot(k - 1);
  return st_[k - 2] + dt * stt_[k - 2];
}

double LiftCurve::s(double t) const {
  const int k = piece_of(t);
  if (t == 0.0) return dc_.s_vals[0];
  if (k >= 1 && t == knot(k))  // knot values are midpoints of adjacent samples
    return 0.5 * (dc_.s_vals[k - 1] + dc_.s_vals[k]);
  return s_piece(k, t);
}

double LiftCurve::s_deriv(double t) const { return s_deriv_piece(piece_of(t), t); }

double LiftCurve::s_second(double t) const {
  const int k = piece_of(t);
  if (k == 1) return st_[0] / tau_;
  return stt_[k - 2];
}

double LiftCurve::g(double t) const {
  const int k = piece_of(t);
  if (t == knot(k)) return dc_.g_vals[k];
  if (t == knot(k - 1)) return dc_.g_vals[k - 1];
  const double theta = (t - knot(k - 1)) / tau_;
  return dc_.g_vals[k - 1] + theta * (dc_.g_vals[k] - dc_.g_vals[k - 1]);
}

double LiftCurve::g_deriv(double t) const {
  const int k = piece_of(t);
  return (dc_.g_vals[k] - dc_.g_vals[k - 1]) / tau_;
}

ContinuousControl ContinuousControl::analytic(std::function<double(double)> s,
                                              std::function<double(double)> g, double T,
                                              std::function<double(double)> s_deriv,
                                              std::function<double(double)> s_second,
                                              std::function<double(double)> g_deriv) {
  if (!s || !g) throw std::invalid_argument("analytic control needs s and g callables");
  if (!(T > 0.0)) throw std::invalid_argument("horizon T must be positive");
  ContinuousControl v;
  v.kind = Kind::analytic;
  v.T = T;
  v.s = s;
  v.g = g;
  v.s_deriv = s_deriv ? std::move(s_deriv) : [s](double t) {
    return (s(t + kFdStep) - s(t - kFdStep)) / (2.0 * kFdStep);
  };
  v.s_second = s_second ? std::move(s_second) : [s](double t) {
    return (s(t + kFdStep) - 2.0 * s(t) + s(t - kFdStep)) / (kFdStep * kFdStep);
  };
  v.g_deriv = g_deriv ? std::move(g_deriv) : [g](double t) {
    return (g(t + kFdStep) - g(t - kFdStep)) / (2.0 * kFdStep);
  };
  v.s0 = v.s(0.0);
  return v;
}

ContinuousControl ContinuousControl::from_lift(const DiscreteControl& dc) {
  auto lift = std::make_shared<const LiftCurve>(dc);
  ContinuousControl v;
  v.kind = Kind::lift;
  v.T = dc.T;
  v.s0 = dc.s_vals[0];
  v.lift = lift;
  v.s = [lift](double t) { return lift->s(t); };
  v.s_deriv = [lift](double t) { return lift->s_deriv(t); };
  v.s_second = [lift](double t) { return lift->s_second(t); };
  v.g = [lift](double t) { return lift->g(t); };
  v.g_deriv = [lift](double t) { return lift->g_deriv(t); };
  return v;
}

DiscreteControl sample_Qn(const ContinuousControl& v, int n) {
  if (n < 1) throw std::invalid_argument("sample_Qn needs n >= 1");
  const double tau = v.T / n;
  std::vector<double> s(n + 1), g(n + 1);
  for (int k = 0; k <= n; ++k) {
    const double t = k * tau;
    s[k] = v.s(t);
    g[k] = v.g(t);
  }
  return DiscreteControl::make(std::move(s), std::move(g), v.T);
}

ContinuousControl lift_Pn(const DiscreteControl& dc) { return ContinuousControl::from_lift(dc); }

double continuous_w22_sq(const ContinuousControl& v, int panels) {
  auto f = [&v](double t) {
    const double s = v.s(t);
    const double sd = v.s_deriv(t);
    const double sdd = v.s_second(t);
    return s * s + sd * sd + sdd * sdd;
  };
  if (v.kind == ContinuousControl::Kind::lift) {
    const LiftCurve& lc = *v.lift;
    double sum = 0.0;
    for (int k = 1; k <= lc.n(); ++k) {
      auto piece = [&lc, k](double t) {
        const double s = lc.s_piece(k, t);
        const double sd = lc.s_deriv_piece(k, t);
        const double sdd = lc.s_second(t);
        return s * s + sd * sd + sdd * sdd;
      };
      sum += gauss4(piece, lc.knot(k - 1), lc.knot(k));
    }
    return sum;
  }
  if (panels <= 0) panels = 256;
  return composite_gauss4(f, 0.0, v.T, panels);
}

double continuous_w21_sq(const ContinuousControl& v, int panels) {
  auto f = [&v](double t) {
    const double g = v.g(t);
    const double gd = v.g_deriv(t);
    return g * g + gd * gd;
  };
  if (v.kind == ContinuousControl::Kind::lift) {
    const LiftCurve& lc = *v.lift;
    double sum = 0.0;
    for (int k = 1; k <= lc.n(); ++k) {
      const double g0 = lc.control().g_vals[k - 1];
      const double g1 = lc.control().g_vals[k];
      const double gd = (g1 - g0) / lc.tau();
      auto piece = [&](double t) {
        const double theta = (t - lc.knot(k - 1)) / lc.tau();
        const double g = g0 + theta * (g1 - g0);
        return g * g + gd * gd;
      };
      sum += gauss4(piece, lc.knot(k - 1), lc.knot(k));
    }
    return sum;
  }
  if (panels <= 0) panels = 256;
  return composite_gauss4(f, 0.0, v.T, panels);
}

AdmissibilityReport check_admissible(const DiscreteControl& dc, const ProblemData& pd,
                                     double epsilon) {
  const double radius = pd.R + epsilon;
  if (!(radius > 0.0)) throw std::invalid_argument("R + epsilon must be positive");
  AdmissibilityReport rep;
  rep.bounds_ok = true;
  for (double sk : dc.s_vals)
    if (!(sk >= pd.delta && sk <= pd.l)) rep.bounds_ok = false;
  rep.w22_s = norm_w22(dc.s_vals, dc.tau());
  rep.w21_g = norm_w21(dc.g_vals, dc.tau());
  rep.norm_ok = std::max(rep.w22_s, rep.w21_g) <= radius * radius;
  rep.in_set = rep.bounds_ok && rep.norm_ok;
  return rep;
}

AdmissibilityReport check_admissible(const ContinuousControl& v, const ProblemData& pd,
                                     double epsilon) {
  const double radius = pd.R + epsilon;
  if (!(radius > 0.0)) throw std::invalid_argument("R + epsilon must be positive");
  AdmissibilityReport rep;
  rep.bounds_ok = true;
  const int samples = 1024;
  for (int i = 0; i <= samples; ++i) {
    const double t = v.T * i / samples;
    const double st = v.s(t);
    if (!(st >= pd.delta - 1e-12 && st <= pd.l + 1e-12)) rep.bounds_ok = false;
  }
  if (std::fabs(v.s(0.0) - pd.s0) > 1e-9) rep.bounds_ok = false;
  rep.w22_s = continuous_w22_sq(v);
  rep.w21_g = continuous_w21_sq(v);
  rep.norm_ok = std::max(rep.w22_s, rep.w21_g) <= radius * radius;
  rep.in_set = rep.bounds_ok && rep.norm_ok;
  return rep;
}

bool lipschitz_check(const DiscreteControl& dc, double C_cap) {
  if (!(C_cap > 0.0)) throw std::invalid_argument("C_cap must be positive");
  const double tau = dc.tau();
  for (int k = 1; k <= dc.n(); ++k)
    if (std::fabs(dc.s_vals[k] - dc.s_vals[k - 1]) > C_cap * tau) return false;
  return true;
}

}  // namespace stefanopt
