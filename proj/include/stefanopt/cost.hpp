#pragma once

#include <span>
#include <vector>

#include "stefanopt/control.hpp"
#include "stefanopt/problem.hpp"
#include "stefanopt/state.hpp"

namespace stefanopt {

struct CostBreakdown {
  double total = 0.0;
  double flux_term = 0.0;   // beta0 part, trace at x = 0
  double phase_term = 0.0;  // beta1 part, trace at x = s_k
};

/// Per-step target values for the two boundary traces; slot k-1 holds the
/// value for step k. Used instead of the slab averages of mu/nu when the
/// data comes from a synthesizing forward run.
struct CostTargets {
  std::vector<double> nu;  // targets for u(0; k)
  std::vector<double> mu;  // targets for u(s_k; k)
};

/// Discrete cost: beta0 tau sum (u(0;k) - nu_k)^2 + beta1 tau sum
/// (u(s_k;k) - mu_k)^2 with nu_k, mu_k the slab means of the data.
CostBreakdown discrete_cost(const DiscreteStateVector& dsv, const DiscreteControl& dc,
                            const ProblemData& pd);

CostBreakdown discrete_cost(const DiscreteStateVector& dsv, const DiscreteControl& dc,
                            const ProblemData& pd, const CostTargets& targets);

/// Approximation of the continuous cost of v: the discrete cost of the
/// state solved at the n_fine-point sampling of v. The discrete optima
/// converge to the continuous one, so refining n_fine refines the estimate.
CostBreakdown continuous_cost_estimate(const ContinuousControl& v, const ProblemData& pd,
                                       int n_fine, int m);

}  // namespace stefanopt
