#include "stefanopt/cost.hpp"

#include <stdexcept>

namespace stefanopt {

namespace {

CostBreakdown cost_against(const DiscreteStateVector& dsv, const DiscreteControl& dc,
                           const ProblemData& pd, const std::vector<double>* nu_k,
                           const std::vector<double>* mu_k) {
  if (dsv.n() != dc.n()) throw std::invalid_argument("discrete_cost: mismatched n");
  const int n = dc.n();
  const double tau = dc.tau();
  CostBreakdown cb;
  for (int k = 1; k <= n; ++k) {
    const StateSlice& slice = dsv.slices[k];
    if (pd.beta0 > 0.0) {
      const double target = nu_k ? (*nu_k)[k - 1] : steklov_average(pd.nu, k, tau);
      const double d = slice.nodal.front() - target;
      cb.flux_term += pd.beta0 * tau * d * d;
    }
    if (pd.beta1 > 0.0) {
      const double target = mu_k ? (*mu_k)[k - 1] : steklov_average(pd.mu, k, tau);
      const double d = slice.nodal.back() - target;
      cb.phase_term += pd.beta1 * tau * d * d;
    }
  }
  cb.total = cb.flux_term + cb.phase_term;
  return cb;
}

}  // namespace

CostBreakdown discrete_cost(const DiscreteStateVector& dsv, const DiscreteControl& dc,
                            const ProblemData& pd) {
  return cost_against(dsv, dc, pd, nullptr, nullptr);
}

CostBreakdown discrete_cost(const DiscreteStateVector& dsv, const DiscreteControl& dc,
                            const ProblemData& pd, const CostTargets& targets) {
  if (static_cast<int>(targets.nu.size()) != dc.n() ||
      static_cast<int>(targets.mu.size()) != dc.n())
    throw std::invalid_argument("discrete_cost: target length must equal n");
  return cost_against(dsv, dc, pd, &targets.nu, &targets.mu);
}

CostBreakdown continuous_cost_estimate(const ContinuousControl& v, const ProblemData& pd,
                                       int n_fine, int m) {
  if (n_fine < 4) throw std::invalid_argument("continuous_cost_estimate: n_fine must be >= 4");
  const DiscreteControl dc = sample_Qn(v, n_fine);
  const DiscreteStateVector dsv = solve_state(dc, pd, m);
  return discrete_cost(dsv, dc, pd);
}

}  // namespace stefanopt
