#pragma once

#include <vector>

#include "stefanopt/control.hpp"
#include "stefanopt/fem.hpp"
#include "stefanopt/problem.hpp"

namespace stefanopt {

/// One time level of the marched solution: nodal values of the piecewise
/// linear interpolant on the uniform mesh of [0, s_k].
struct StateSlice {
  int k = 0;
  double s_k = 0.0;
  Mesh1D mesh;
  std::vector<double> nodal;

  /// Piecewise-linear value at x in [0, s_k].
  double interp(double x) const;
};

/// Evaluates the slice at x in [0, l], folding x into [0, s_k] by iterated
/// reflection about doubling multiples of s_k. The fold count never exceeds
/// N = 1 + floor(log2(l/delta)).
double extend_eval(const StateSlice& slice, double x, double l, double delta);

/// Same, reporting the number of folds taken.
double extend_eval_counted(const StateSlice& slice, double x, double l, double delta, int& folds);

int max_reflections(double l, double delta);

struct DiscreteStateVector {
  std::vector<StateSlice> slices;  // n+1 entries, slice 0 = sampled phi
  double tau = 0.0;
  double T = 0.0;
  double l = 0.0;
  double delta = 0.0;

  int n() const noexcept { return static_cast<int>(slices.size()) - 1; }
};

/// Marches the per-step Galerkin solves k = 1..n. Boundary data enters
/// through slab averages along the lifted control curve: the free-boundary
/// pair from trace_averages with the quadratic s-lift, and the flux as the
/// slab mean of the piecewise-linear g-lift.
DiscreteStateVector solve_state(const DiscreteControl& dc, const ProblemData& pd, int m);

enum class InterpMode { constant, linear };

/// Piecewise-constant or piecewise-linear-in-time interpolant of the state,
/// evaluated with the reflection extension in x; the linear mode clamps to
/// the final slice for t >= T.
double eval_interpolant(const DiscreteStateVector& dsv, double x, double t, InterpMode mode);

/// Index k of the slab (t_{k-1}, t_k] containing t (k = 0 iff t <= 0).
int slab_of(double t, double tau, int n);

}  // namespace stefanopt
