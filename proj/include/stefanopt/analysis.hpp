#pragma once

#include <span>
#include <string>
#include <vector>

#include "stefanopt/cost.hpp"
#include "stefanopt/state.hpp"

namespace stefanopt {

/// Computed sides of the state stability estimates. lhs_first is the
/// first-estimate left side max_k int u^2 + tau sum int |u'|^2 over the
/// extended slices; lhs_second_extra adds the tau sum int u_tbar^2 and
/// max_k int |u'|^2 terms of the second estimate. rhs_data collects the
/// squared data norms, rhs_boundary_overlap the indicator-weighted overlap
/// sum over expanding boundary steps. ratio = lhs_first / rhs when the
/// denominator is positive, else 0 with ratio_defined = false.
struct EnergyReport {
  double lhs_first = 0.0;
  double lhs_second_extra = 0.0;
  double rhs_data = 0.0;
  double rhs_boundary_overlap = 0.0;
  double ratio = 0.0;
  bool ratio_defined = false;
};

EnergyReport energy_report(const DiscreteStateVector& dsv, const DiscreteControl& dc,
                           const ProblemData& pd);

/// Squared grid Sobolev-Slobodeckij norm of fractional order 1/4:
/// tau sum_{k<n} h_k^2 plus the double sum over j != k of
/// tau^2 (h_j - h_k)^2 / |t_j - t_k|^{3/2}.
double quarter_norm(std::span<const double> samples, double tau);

/// Residual of the continuous weak identity, with the state replaced by its
/// linear-in-time interpolant and the boundary by the lifted control curve,
/// one value per test function. Space integrals use the composite midpoint
/// rule on the slice resolution, time integrals 4-point Gauss per slab.
std::vector<double> weak_residual(const DiscreteStateVector& dsv, const DiscreteControl& dc,
                                  const ProblemData& pd,
                                  const std::vector<FunctionSpec>& test_fns);

struct SweepRow {
  int n = 0;
  int m = 0;
  double cost = 0.0;
  double energy_ratio = 0.0;
  double trace_error_flux = 0.0;
  double trace_error_phase = 0.0;
  double lift_sup_error = 0.0;
  bool ok = true;
  std::string error;
};

struct SweepTable {
  std::vector<SweepRow> rows;
};

/// Samples the truth control at each n, solves, and records cost, energy
/// ratio, trace mismatches and the sup distance between the resampled lift
/// and the truth boundary. Per-row failures are recorded and the sweep
/// continues.
SweepTable convergence_sweep(const ProblemData& pd, const ContinuousControl& truth,
                             std::span<const int> n_list,
                             const std::function<int(int)>& m_of_n);

// Exact integrals of the reflection-extended piecewise-linear slice over
// [x_lo, x_hi] (subset of [0, l]); used by the energy report and the
// extension-bound checks.
double extended_l2_sq(const StateSlice& slice, double x_lo, double x_hi, double l, double delta);
double extended_h1_sq(const StateSlice& slice, double x_lo, double x_hi, double l, double delta);
double extended_diff_l2_sq(const StateSlice& a, const StateSlice& b, double x_lo, double x_hi,
                           double l, double delta);

}  // namespace stefanopt
