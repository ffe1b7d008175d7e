#pragma once

#include <functional>
#include <span>
#include <vector>

#include "stefanopt/problem.hpp"

namespace stefanopt {

/// Uniform mesh of [0, s_k] with m linear elements.
struct Mesh1D {
  std::vector<double> nodes;

  static Mesh1D uniform(double s_k, int m);

  int m() const noexcept { return static_cast<int>(nodes.size()) - 1; }
  double h() const noexcept { return nodes.back() / m(); }
  double right() const noexcept { return nodes.back(); }
};

/// Tridiagonal Galerkin system of one time step. Bands are indexed by row:
/// sub[i] = A(i, i-1), diag[i] = A(i, i), super[i] = A(i, i+1).
struct StepSystem {
  std::vector<double> sub, diag, super, rhs;
  Mesh1D mesh;
};

/// Time-step uniqueness threshold tau0 = (M^2/(2 a0) + M)^{-1}; M = 0 gives
/// +infinity (no lower-order terms, every step is unconditionally unique).
double stability_threshold(double M, double a0);

/// Sampled sup bound of |a|, |b|, |c| over [0, l] x [0, T].
double sampled_coefficient_bound(const ProblemData& pd, int samples);

/// Assembles the hat-basis system of the step-k identity on [0, s_k]:
///   A(i,j) = int a_k eta_j' eta_i' - b_k eta_j' eta_i - c_k eta_j eta_i
///            + (1/tau) eta_j eta_i dx,
///   rhs(i) = int ((1/tau) u_prev - f_k) eta_i dx
///            - (gs_k - chi_k) eta_i(s_k) - g_k eta_i(0),
/// with coefficient slab averages evaluated at the spatial quadrature points
/// and 2-point Gauss element integration.
StepSystem assemble_step(const ProblemData& pd, int k, double s_k, int m, double tau,
                         const std::function<double(double)>& u_prev, double gs_k, double chi_k,
                         double g_k);

/// Thomas solve with a dense partial-pivot fallback; verifies the residual
/// ||A u - b||_inf <= 1e-10 (1 + ||b||_inf) and throws on a singular system.
std::vector<double> solve_step(const StepSystem& sys);

double residual_inf(const StepSystem& sys, std::span<const double> u);

}  // namespace stefanopt
