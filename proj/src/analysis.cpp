#include "stefanopt/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stefanopt/quadrature.hpp"

namespace stefanopt {

namespace {

// Breakpoints and values of the reflection-extended interpolant on [0, hi].
// Each doubling band [B, 2B] carries the mirror image of [0, B], so the
// polyline is built by repeated mirroring until it covers hi.
std::vector<std::pair<double, double>> extended_polyline(const StateSlice& slice, double hi) {
  std::vector<std::pair<double, double>> pl;
  pl.reserve(slice.mesh.nodes.size() * 4);
  for (std::size_t i = 0; i < slice.mesh.nodes.size(); ++i)
    pl.emplace_back(slice.mesh.nodes[i], slice.nodal[i]);
  double band = slice.s_k;
  while (band < hi * (1.0 - 1e-15)) {
    const int count = static_cast<int>(pl.size());
    for (int i = count - 2; i >= 0; --i)
      pl.emplace_back(2.0 * band - pl[i].first, pl[i].second);
    band *= 2.0;
  }
  return pl;
}

double segment_sq_integral(double len, double va, double vb) {
  return len * (va * va + va * vb + vb * vb) / 3.0;
}

double polyline_value(const std::vector<std::pair<double, double>>& pl, double x) {
  if (x <= pl.front().first) return pl.front().second;
  if (x >= pl.back().first) return pl.back().second;
  auto it = std::upper_bound(pl.begin(), pl.end(), x,
                             [](double v, const auto& p) { return v < p.first; });
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double theta = (x - lo.first) / (hi.first - lo.first);
  return lo.second + theta * (hi.second - lo.second);
}

}  // namespace

double extended_l2_sq(const StateSlice& slice, double x_lo, double x_hi, double l, double delta) {
  (void)delta;
  if (x_hi <= x_lo) return 0.0;
  if (x_hi > l * (1.0 + 1e-12)) throw std::invalid_argument("integral beyond the domain width");
  const auto pl = extended_polyline(slice, x_hi);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < pl.size(); ++i) {
    const double a = std::max(pl[i].first, x_lo);
    const double b = std::min(pl[i + 1].first, x_hi);
    if (b <= a) continue;
    const double seg = pl[i + 1].first - pl[i].first;
    const double va = pl[i].second +
                      (a - pl[i].first) / seg * (pl[i + 1].second - pl[i].second);
    const double vb = pl[i].second +
                      (b - pl[i].first) / seg * (pl[i + 1].second - pl[i].second);
    sum += segment_sq_integral(b - a, va, vb);
  }
  return sum;
}

double extended_h1_sq(const StateSlice& slice, double x_lo, double x_hi, double l, double delta) {
  (void)delta;
  if (x_hi <= x_lo) return 0.0;
  if (x_hi > l * (1.0 + 1e-12)) throw std::invalid_argument("integral beyond the domain width");
  const auto pl = extended_polyline(slice, x_hi);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < pl.size(); ++i) {
    const double a = std::max(pl[i].first, x_lo);
    const double b = std::min(pl[i + 1].first, x_hi);
    if (b <= a) continue;
    const double seg = pl[i + 1].first - pl[i].first;
    const double slope = (pl[i + 1].second - pl[i].second) / seg;
    sum += slope * slope * (b - a);
  }
  return sum;
}

double extended_diff_l2_sq(const StateSlice& a, const StateSlice& b, double x_lo, double x_hi,
                           double l, double delta) {
  (void)delta;
  if (x_hi <= x_lo) return 0.0;
  if (x_hi > l * (1.0 + 1e-12)) throw std::invalid_argument("integral beyond the domain width");
  const auto pa = extended_polyline(a, x_hi);
  const auto pb = extended_polyline(b, x_hi);
  std::vector<double> xs;
  xs.reserve(pa.size() + pb.size() + 2);
  xs.push_back(x_lo);
  for (const auto& p : pa)
    if (p.first > x_lo && p.first < x_hi) xs.push_back(p.first);
  for (const auto& p : pb)
    if (p.first > x_lo && p.first < x_hi) xs.push_back(p.first);
  xs.push_back(x_hi);
  std::sort(xs.begin(), xs.end());
  double sum = 0.0;
  double prev_x = xs[0];
  double prev_v = polyline_value(pa, prev_x) - polyline_value(pb, prev_x);
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double x = xs[i];
    if (x <= prev_x) continue;
    const double v = polyline_value(pa, x) - polyline_value(pb, x);
    sum += segment_sq_integral(x - prev_x, prev_v, v);
    prev_x = x;
    prev_v = v;
  }
  return sum;
}

EnergyReport energy_report(const DiscreteStateVector& dsv, const DiscreteControl& dc,
                           const ProblemData& pd) {
  if (dsv.n() != dc.n()) throw std::invalid_argument("energy_report: mismatched n");
  const int n = dsv.n();
  const double tau = dsv.tau;
  const double l = pd.l;
  EnergyReport rep;

  double max_l2 = 0.0;
  for (int k = 0; k <= n; ++k)
    max_l2 = std::max(max_l2, extended_l2_sq(dsv.slices[k], 0.0, l, l, pd.delta));
  double sum_h1 = 0.0;
  double max_h1 = 0.0;
  for (int k = 1; k <= n; ++k) {
    const double h1 = extended_h1_sq(dsv.slices[k], 0.0, l, l, pd.delta);
    sum_h1 += tau * h1;
    max_h1 = std::max(max_h1, h1);
  }
  rep.lhs_first = max_l2 + sum_h1;

  double sum_ut = 0.0;
  for (int k = 1; k <= n; ++k)
    sum_ut += extended_diff_l2_sq(dsv.slices[k], dsv.slices[k - 1], 0.0, l, l, pd.delta) / tau;
  rep.lhs_second_extra = sum_ut + max_h1;

  const ContinuousControl lifted = lift_Pn(dc);
  const int panels = std::max(16, dsv.slices[0].mesh.m());
  const double phi_sq =
      composite_gauss4([&pd](double x) { const double v = pd.phi(x); return v * v; }, 0.0,
                       pd.s0, panels);
  double g_sq = 0.0, f_sq = 0.0, gtrace_sq = 0.0, chitrace_sq = 0.0;
  for (int k = 1; k <= n; ++k) {
    const double t0 = (k - 1) * tau;
    const double t1 = k * tau;
    g_sq += gauss4([&lifted](double t) { const double v = lifted.g(t); return v * v; }, t0, t1);
    f_sq += gauss4(
        [&pd, panels](double t) {
          return composite_gauss4(
              [&pd, t](double x) { const double v = pd.f(x, t); return v * v; }, 0.0, pd.l,
              panels);
        },
        t0, t1);
    gtrace_sq += gauss4(
        [&](double t) {
          const double v = pd.gamma(lifted.s(t), t) * lifted.s_deriv(t);
          return v * v;
        },
        t0, t1);
    chitrace_sq += gauss4(
        [&](double t) {
          const double v = pd.chi(lifted.s(t), t);
          return v * v;
        },
        t0, t1);
  }
  rep.rhs_data = phi_sq + g_sq + f_sq + gtrace_sq + chitrace_sq;

  for (int k = 1; k <= n - 1; ++k) {
    const double d = dc.s_vals[k + 1] - dc.s_vals[k];
    if (d > 0.0)
      rep.rhs_boundary_overlap +=
          extended_l2_sq(dsv.slices[k], dc.s_vals[k], dc.s_vals[k + 1], l, pd.delta);
  }

  const double den = rep.rhs_data + rep.rhs_boundary_overlap;
  if (den > 0.0) {
    rep.ratio = rep.lhs_first / den;
    rep.ratio_defined = true;
  }
  return rep;
}

double quarter_norm(std::span<const double> samples, double tau) {
  if (samples.size() < 2) throw std::invalid_argument("quarter_norm needs at least two samples");
  if (!(tau > 0.0)) throw std::invalid_argument("quarter_norm: tau must be positive");
  const int n = static_cast<int>(samples.size()) - 1;
  double l2 = 0.0;
  for (int k = 0; k < n; ++k) l2 += tau * samples[k] * samples[k];
  double semi = 0.0;
  for (int j = 0; j <= n; ++j) {
    for (int k = 0; k <= n; ++k) {
      if (j == k) continue;
      const double diff = samples[j] - samples[k];
      const double dist = std::fabs(static_cast<double>(j - k)) * tau;
      semi += tau * tau * diff * diff / std::pow(dist, 1.5);
    }
  }
  return l2 + semi;
}

namespace {

// Slope of the reflection-extended interpolant; each fold flips the sign.
double extended_slope(const StateSlice& slice, double x, double l, double delta) {
  double sk = slice.s_k;
  double sign = 1.0;
  int guard = max_reflections(l, delta) + 4;
  while (x > sk) {
    int j = static_cast<int>(std::ceil(std::log2(x / sk)));
    if (j < 1) j = 1;
    double bound = std::ldexp(sk, j);
    if (x > bound) bound = std::ldexp(sk, ++j);
    x = bound - x;
    if (x < 0.0) x = 0.0;
    sign = -sign;
    if (--guard < 0) throw std::logic_error("extended_slope: reflection did not terminate");
  }
  const int m = slice.mesh.m();
  int e = static_cast<int>(x / slice.mesh.h());
  if (e >= m) e = m - 1;
  if (e < 0) e = 0;
  return sign * (slice.nodal[e + 1] - slice.nodal[e]) /
         (slice.mesh.nodes[e + 1] - slice.mesh.nodes[e]);
}

}  // namespace

std::vector<double> weak_residual(const DiscreteStateVector& dsv, const DiscreteControl& dc,
                                  const ProblemData& pd,
                                  const std::vector<FunctionSpec>& test_fns) {
  if (dsv.n() != dc.n()) throw std::invalid_argument("weak_residual: mismatched n");
  const int n = dsv.n();
  const double tau = dsv.tau;
  const ContinuousControl lifted = lift_Pn(dc);
  const int panels = std::max(8, dsv.slices[0].mesh.m());
  // Wide enough that rounding noise in the difference quotient stays far
  // below the 1e-12 linearity budget; truncation is immaterial against the
  // O(tau + h) size of the residual itself.
  constexpr double hx = 1e-4;

  std::vector<double> residuals;
  residuals.reserve(test_fns.size());
  for (const FunctionSpec& phi : test_fns) {
    if (phi.arity() != 2) throw std::invalid_argument("weak_residual: test function arity != 2");
    double total = 0.0;
    for (int k = 1; k <= n; ++k) {
      const StateSlice& prev = dsv.slices[k - 1];
      const StateSlice& here = dsv.slices[k];
      const double t0 = (k - 1) * tau;
      const double t1 = k * tau;
      const double mid = 0.5 * (t0 + t1);
      const double half = 0.5 * (t1 - t0);
      for (int q = 0; q < 4; ++q) {
        const double tq = mid + half * kGauss4X[q];
        const double wt = half * kGauss4W[q];
        const double s_t = lifted.s(tq);
        const double theta = (tq - t0) / tau;

        double inner = 0.0;
        const double wx = s_t / panels;
        for (int p = 0; p < panels; ++p) {
          const double xm = (p + 0.5) * wx;
          const double u_prev = extend_eval(prev, xm, pd.l, pd.delta);
          const double u_here = extend_eval(here, xm, pd.l, pd.delta);
          const double u_hat = u_prev + theta * (u_here - u_prev);
          const double ux_prev = extended_slope(prev, xm, pd.l, pd.delta);
          const double ux_here = extended_slope(here, xm, pd.l, pd.delta);
          const double ux_hat = ux_prev + theta * (ux_here - ux_prev);
          const double u_t = (u_here - u_prev) / tau;
          const double pv = phi(xm, tq);
          const double px = (phi(xm + hx, tq) - phi(xm - hx, tq)) / (2.0 * hx);
          inner += wx * (pd.a(xm, tq) * ux_hat * px - pd.b(xm, tq) * ux_hat * pv -
                         pd.c(xm, tq) * u_hat * pv + u_t * pv + pd.f(xm, tq) * pv);
        }
        total += wt * inner;
        total += wt * ((pd.gamma(s_t, tq) * lifted.s_deriv(tq) - pd.chi(s_t, tq)) * phi(s_t, tq) +
                       lifted.g(tq) * phi(0.0, tq));
      }
    }
    residuals.push_back(total);
  }
  return residuals;
}

SweepTable convergence_sweep(const ProblemData& pd, const ContinuousControl& truth,
                             std::span<const int> n_list,
                             const std::function<int(int)>& m_of_n) {
  for (std::size_t i = 1; i < n_list.size(); ++i)
    if (n_list[i] <= n_list[i - 1])
      throw std::invalid_argument("convergence_sweep: n_list must be increasing");
  SweepTable table;
  for (int n : n_list) {
    SweepRow row;
    row.n = n;
    row.m = m_of_n(n);
    try {
      const DiscreteControl dc = sample_Qn(truth, n);
      const DiscreteStateVector dsv = solve_state(dc, pd, row.m);
      row.cost = discrete_cost(dsv, dc, pd).total;
      row.energy_ratio = energy_report(dsv, dc, pd).ratio;
      const double tau = dc.tau();
      double flux = 0.0, phase = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double dnu = dsv.slices[k].nodal.front() - steklov_average(pd.nu, k, tau);
        const double dmu = dsv.slices[k].nodal.back() - steklov_average(pd.mu, k, tau);
        flux += tau * dnu * dnu;
        phase += tau * dmu * dmu;
      }
      row.trace_error_flux = std::sqrt(flux);
      row.trace_error_phase = std::sqrt(phase);
      const ContinuousControl lifted = lift_Pn(dc);
      double sup = 0.0;
      const int dense = 20 * n;
      for (int i = 0; i <= dense; ++i) {
        const double t = truth.T * i / dense;
        sup = std::max(sup, std::fabs(lifted.s(t) - truth.s(t)));
      }
      row.lift_sup_error = sup;
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace stefanopt
