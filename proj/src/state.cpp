#include "stefanopt/state.hpp"

#include <cmath>
#include <iostream>
#include <mutex>
#include <stdexcept>
#include <string>

#include "stefanopt/quadrature.hpp"

namespace stefanopt {

double StateSlice::interp(double x) const {
  const int m = mesh.m();
  const double h = mesh.h();
  if (x <= 0.0) return nodal.front();
  if (x >= s_k) return nodal.back();
  int e = static_cast<int>(x / h);
  if (e >= m) e = m - 1;
  while (e > 0 && x < mesh.nodes[e]) --e;
  while (e + 1 < m && x > mesh.nodes[e + 1]) ++e;
  const double theta = (x - mesh.nodes[e]) / (mesh.nodes[e + 1] - mesh.nodes[e]);
  return nodal[e] + theta * (nodal[e + 1] - nodal[e]);
}

int max_reflections(double l, double delta) {
  return 1 + static_cast<int>(std::floor(std::log2(l / delta)));
}

double extend_eval_counted(const StateSlice& slice, double x, double l, double delta, int& folds) {
  if (x < 0.0 || x > l * (1.0 + 1e-12))
    throw std::invalid_argument("extend_eval: x outside [0, l]");
  const double sk = slice.s_k;
  if (!(sk >= delta)) throw std::invalid_argument("extend_eval: slice boundary below delta");
  folds = 0;
  const int guard = max_reflections(l, delta) + 4;
  while (x > sk) {
    // Band index: smallest j >= 1 with x <= 2^j * s_k; ties go to the
    // lower band so the image of an exact band boundary is 0.
    int j = static_cast<int>(std::ceil(std::log2(x / sk)));
    if (j < 1) j = 1;
    double bound = std::ldexp(sk, j);
    if (x > bound) bound = std::ldexp(sk, ++j);
    x = bound - x;
    if (x < 0.0) x = 0.0;
    if (++folds > guard) throw std::logic_error("extend_eval: reflection did not terminate");
  }
  return slice.interp(x);
}

double extend_eval(const StateSlice& slice, double x, double l, double delta) {
  int folds = 0;
  return extend_eval_counted(slice, x, l, delta, folds);
}

DiscreteStateVector solve_state(const DiscreteControl& dc, const ProblemData& pd, int m) {
  pd.check_geometry();
  if (m < 2) throw std::invalid_argument("solve_state needs m >= 2");
  const int n = dc.n();
  const double tau = dc.tau();
  for (double sk : dc.s_vals)
    if (!(sk >= pd.delta && sk <= pd.l))
      throw std::invalid_argument("solve_state: control boundary outside [delta, l]");

  // A step above the uniqueness threshold is allowed but worth a note.
  const double tau0 = stability_threshold(sampled_coefficient_bound(pd, 12), pd.a0);
  if (tau >= tau0) {
    static std::once_flag warned;
    std::call_once(warned, [&] {
      std::cerr << "note: time step " << tau << " is at or above the uniqueness threshold "
                << tau0 << "\n";
    });
  }

  const ContinuousControl lifted = lift_Pn(dc);

  DiscreteStateVector dsv;
  dsv.tau = tau;
  dsv.T = dc.T;
  dsv.l = pd.l;
  dsv.delta = pd.delta;
  dsv.slices.reserve(n + 1);

  StateSlice init;
  init.k = 0;
  init.s_k = dc.s_vals[0];
  init.mesh = Mesh1D::uniform(init.s_k, m);
  init.nodal.resize(m + 1);
  for (int i = 0; i <= m; ++i) init.nodal[i] = pd.phi(init.mesh.nodes[i]);
  dsv.slices.push_back(std::move(init));

  for (int k = 1; k <= n; ++k) {
    const double s_k = dc.s_vals[k];
    const auto [gs_k, chi_k] = trace_averages(lifted, pd.gamma, pd.chi, k, tau);
    const double g_k =
        gauss4([&lifted](double t) { return lifted.g(t); }, (k - 1) * tau, k * tau) / tau;

    const StateSlice& prev = dsv.slices[k - 1];
    auto u_prev = [&prev, &pd](double x) { return extend_eval(prev, x, pd.l, pd.delta); };

    StepSystem sys = assemble_step(pd, k, s_k, m, tau, u_prev, gs_k, chi_k, g_k);
    StateSlice slice;
    slice.k = k;
    slice.s_k = s_k;
    try {
      slice.nodal = solve_step(sys);
    } catch (const std::exception& e) {
      throw std::runtime_error("step " + std::to_string(k) + ": " + e.what());
    }
    slice.mesh = std::move(sys.mesh);
    dsv.slices.push_back(std::move(slice));
  }
  return dsv;
}

int slab_of(double t, double tau, int n) {
  if (t <= 0.0) return 0;
  int k = static_cast<int>(std::ceil(t / tau));
  if (k < 1) k = 1;
  if (k > n) k = n;
  while (k > 1 && (k - 1) * tau >= t) --k;
  while (k < n && k * tau < t) ++k;
  return k;
}

double eval_interpolant(const DiscreteStateVector& dsv, double x, double t, InterpMode mode) {
  if (x < 0.0 || x > dsv.l * (1.0 + 1e-12))
    throw std::invalid_argument("eval_interpolant: x outside [0, l]");
  if (t < 0.0) throw std::invalid_argument("eval_interpolant: t must be nonnegative");
  const int n = dsv.n();
  if (mode == InterpMode::constant) {
    const int k = slab_of(t, dsv.tau, n);
    return extend_eval(dsv.slices[k], x, dsv.l, dsv.delta);
  }
  if (t >= dsv.T) return extend_eval(dsv.slices[n], x, dsv.l, dsv.delta);
  int k = slab_of(t, dsv.tau, n);
  if (k < 1) k = 1;
  const double u_prev = extend_eval(dsv.slices[k - 1], x, dsv.l, dsv.delta);
  const double u_here = extend_eval(dsv.slices[k], x, dsv.l, dsv.delta);
  const double theta = (t - (k - 1) * dsv.tau) / dsv.tau;
  return u_prev + theta * (u_here - u_prev);
}

}  // namespace stefanopt
