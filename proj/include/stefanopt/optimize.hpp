#pragma once

#include <functional>
#include <vector>

#include "stefanopt/cost.hpp"

namespace stefanopt {

enum class OptMethod { fd_gradient, nelder_mead };

struct OptOptions {
  int max_iters = 200;
  double grad_step = 1e-5;      // finite-difference perturbation
  double step0 = 1.0;           // initial line-search step
  double tol = 1e-10;           // stationarity / decrease tolerance
  double penalty_weight = 1.0;  // norm-ball penalty weight
  OptMethod method = OptMethod::fd_gradient;
  unsigned seed = 0;
  bool vary_s = true;  // optimize the boundary samples s_1..s_n
  bool vary_g = true;  // optimize the flux samples g_0..g_n
};

struct HistoryRow {
  int iter = 0;
  double cost = 0.0;     // penalized objective at the accepted iterate
  double penalty = 0.0;  // penalty part alone
  double step = 0.0;     // accepted line-search step (0 for iter 0)
};

struct OptResult {
  DiscreteControl best;
  double best_cost = 0.0;
  std::vector<HistoryRow> history;
  bool converged = false;
  int iters = 0;
};

/// Clamps every s_k into [delta, l] and resets s_0 to the problem's s0;
/// the flux samples are untouched.
DiscreteControl project_box(const DiscreteControl& dc, const ProblemData& pd);

/// Objective of the constrained minimization: discrete cost of the state at
/// the box-projected control plus a quadratic penalty on the norm-ball
/// excess. A solver failure yields +infinity.
double penalized_objective(const DiscreteControl& dc, const ProblemData& pd, int m, double w,
                           const CostTargets* targets = nullptr);

/// Central-difference gradient over the free coordinates, laid out as
/// [s_1..s_n, g_0..g_n] (s_0 is pinned). A coordinate whose perturbed
/// objective is non-finite falls back to a one-sided difference; both sides
/// failing is an error.
std::vector<double> fd_gradient(const std::function<double(const DiscreteControl&)>& obj,
                                const DiscreteControl& dc, double h, bool vary_s = true,
                                bool vary_g = true);

/// Minimizes the penalized objective over the discrete control set, either
/// by projected gradient descent with Armijo backtracking or by Nelder-Mead.
OptResult minimize(const ProblemData& pd, int n, int m, const DiscreteControl& init,
                   const OptOptions& opts, const CostTargets* targets = nullptr);

}  // namespace stefanopt
