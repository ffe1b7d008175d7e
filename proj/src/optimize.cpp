#include "stefanopt/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace stefanopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kArmijoFactor = 1e-4;

struct ObjParts {
  double objective = kInf;
  double cost = kInf;
  double penalty = 0.0;
};

double sq(double v) { return v * v; }

ObjParts objective_parts(const DiscreteControl& dc, const ProblemData& pd, int m, double w,
                         const CostTargets* targets) {
  const DiscreteControl p = project_box(dc, pd);
  const double w22 = norm_w22(p.s_vals, p.tau());
  const double w21 = norm_w21(p.g_vals, p.tau());
  const double r2 = pd.R * pd.R;
  ObjParts parts;
  parts.penalty = w * (sq(std::max(0.0, w22 - r2)) + sq(std::max(0.0, w21 - r2)));
  try {
    const DiscreteStateVector dsv = solve_state(p, pd, m);
    parts.cost = targets ? discrete_cost(dsv, p, pd, *targets).total
                         : discrete_cost(dsv, p, pd).total;
  } catch (const EvalError&) {
    return parts;  // objective stays +inf
  } catch (const std::runtime_error&) {
    return parts;
  }
  parts.objective = parts.cost + parts.penalty;
  return parts;
}

// Free-coordinate layout: [s_1..s_n, g_0..g_n]; s_0 is pinned.
int coord_count(int n) { return 2 * n + 1; }

double get_coord(const DiscreteControl& dc, int idx) {
  const int n = dc.n();
  return idx < n ? dc.s_vals[idx + 1] : dc.g_vals[idx - n];
}

void set_coord(DiscreteControl& dc, int idx, double v) {
  const int n = dc.n();
  if (idx < n)
    dc.s_vals[idx + 1] = v;
  else
    dc.g_vals[idx - n] = v;
}

bool coord_varies(int idx, int n, bool vary_s, bool vary_g) {
  return idx < n ? vary_s : vary_g;
}

}  // namespace

DiscreteControl project_box(const DiscreteControl& dc, const ProblemData& pd) {
  DiscreteControl p = dc;
  for (double& sk : p.s_vals) sk = std::clamp(sk, pd.delta, pd.l);
  p.s_vals[0] = pd.s0;
  return p;
}

double penalized_objective(const DiscreteControl& dc, const ProblemData& pd, int m, double w,
                           const CostTargets* targets) {
  if (w < 0.0) throw std::invalid_argument("penalty weight must be nonnegative");
  return objective_parts(dc, pd, m, w, targets).objective;
}

std::vector<double> fd_gradient(const std::function<double(const DiscreteControl&)>& obj,
                                const DiscreteControl& dc, double h, bool vary_s, bool vary_g) {
  if (!(h > 0.0)) throw std::invalid_argument("fd_gradient: h must be positive");
  const int n = dc.n();
  std::vector<double> grad(coord_count(n), 0.0);
  double base = std::numeric_limits<double>::quiet_NaN();  // computed on demand
  for (int idx = 0; idx < coord_count(n); ++idx) {
    if (!coord_varies(idx, n, vary_s, vary_g)) continue;
    DiscreteControl plus = dc;
    DiscreteControl minus = dc;
    set_coord(plus, idx, get_coord(dc, idx) + h);
    set_coord(minus, idx, get_coord(dc, idx) - h);
    const double fp = obj(plus);
    const double fm = obj(minus);
    if (std::isfinite(fp) && std::isfinite(fm)) {
      grad[idx] = (fp - fm) / (2.0 * h);
      continue;
    }
    if (std::isnan(base)) base = obj(dc);
    if (std::isfinite(fp) && std::isfinite(base))
      grad[idx] = (fp - base) / h;
    else if (std::isfinite(fm) && std::isfinite(base))
      grad[idx] = (base - fm) / h;
    else
      throw std::runtime_error("fd_gradient: objective non-finite on both sides of coordinate " +
                               std::to_string(idx));
  }
  return grad;
}

namespace {

OptResult minimize_gradient(const ProblemData& pd, int m, const DiscreteControl& init,
                            const OptOptions& opts, const CostTargets* targets) {
  const int n = init.n();
  auto obj_value = [&](const DiscreteControl& d) {
    return objective_parts(d, pd, m, opts.penalty_weight, targets).objective;
  };

  OptResult res;
  res.best = project_box(init, pd);
  ObjParts parts = objective_parts(res.best, pd, m, opts.penalty_weight, targets);
  double f = parts.objective;
  res.history.push_back({0, f, parts.penalty, 0.0});

  std::vector<double> prev_x, prev_grad;
  std::vector<double> recent{f};

  int iter = 0;
  for (iter = 1; iter <= opts.max_iters; ++iter) {
    const std::vector<double> grad =
        fd_gradient(obj_value, res.best, opts.grad_step, opts.vary_s, opts.vary_g);
    double gnorm2 = 0.0;
    for (double g : grad) gnorm2 += g * g;
    if (std::sqrt(gnorm2) < opts.tol) {
      res.converged = true;
      break;
    }

    std::vector<double> x(coord_count(n));
    for (int i = 0; i < coord_count(n); ++i) x[i] = get_coord(res.best, i);

    // Barzilai-Borwein trial step when history is available, then Armijo
    // halving from there.
    double trial = opts.step0;
    if (!prev_x.empty()) {
      double ss = 0.0, sy = 0.0;
      for (int i = 0; i < coord_count(n); ++i) {
        const double dx = x[i] - prev_x[i];
        const double dg = grad[i] - prev_grad[i];
        ss += dx * dx;
        sy += dx * dg;
      }
      if (sy > 1e-300) trial = std::clamp(ss / sy, 1e-12, 1e12);
    }

    bool accepted = false;
    double t = trial;
    DiscreteControl cand = res.best;
    ObjParts cand_parts;
    for (int halving = 0; halving < 60; ++halving) {
      DiscreteControl probe = res.best;
      for (int i = 0; i < coord_count(n); ++i) set_coord(probe, i, x[i] - t * grad[i]);
      probe = project_box(probe, pd);
      cand_parts = objective_parts(probe, pd, m, opts.penalty_weight, targets);
      if (cand_parts.objective <= f - kArmijoFactor * t * gnorm2) {
        cand = std::move(probe);
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      res.converged = true;  // no descent at line-search resolution
      break;
    }

    prev_x = std::move(x);
    prev_grad = grad;
    res.best = std::move(cand);
    f = cand_parts.objective;
    res.history.push_back({iter, f, cand_parts.penalty, t});

    recent.push_back(f);
    if (recent.size() > 6) recent.erase(recent.begin());
    if (recent.size() == 6) {
      const double drop = recent.front() - recent.back();
      if (drop < opts.tol * std::max(1.0, std::fabs(recent.front()))) {
        res.converged = true;
        break;
      }
    }
    if (f <= 1e-300) {
      res.converged = true;
      break;
    }
  }
  res.iters = std::min(iter, opts.max_iters);
  res.best_cost = f;
  return res;
}

OptResult minimize_nelder_mead(const ProblemData& pd, int m, const DiscreteControl& init,
                               const OptOptions& opts, const CostTargets* targets) {
  const int n = init.n();
  std::vector<int> free_idx;
  for (int i = 0; i < coord_count(n); ++i)
    if (coord_varies(i, n, opts.vary_s, opts.vary_g)) free_idx.push_back(i);
  const int dim = static_cast<int>(free_idx.size());

  const DiscreteControl base = project_box(init, pd);
  auto to_control = [&](const std::vector<double>& y) {
    DiscreteControl d = base;
    for (int i = 0; i < dim; ++i) set_coord(d, free_idx[i], y[i]);
    return project_box(d, pd);
  };
  auto fval = [&](const std::vector<double>& y) {
    return objective_parts(to_control(y), pd, m, opts.penalty_weight, targets);
  };

  std::vector<std::vector<double>> verts(dim + 1, std::vector<double>(dim));
  for (int i = 0; i < dim; ++i) verts[0][i] = get_coord(base, free_idx[i]);
  for (int v = 1; v <= dim; ++v) {
    verts[v] = verts[0];
    verts[v][v - 1] += std::max(0.1, 0.1 * std::fabs(verts[0][v - 1]));
  }
  std::vector<ObjParts> fx(dim + 1);
  for (int v = 0; v <= dim; ++v) fx[v] = fval(verts[v]);

  auto order = [&]() {
    std::vector<int> idx(dim + 1);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return fx[a].objective < fx[b].objective; });
    std::vector<std::vector<double>> v2(dim + 1);
    std::vector<ObjParts> f2(dim + 1);
    for (int i = 0; i <= dim; ++i) {
      v2[i] = verts[idx[i]];
      f2[i] = fx[idx[i]];
    }
    verts.swap(v2);
    fx.swap(f2);
  };

  OptResult res;
  order();
  double best_seen = fx[0].objective;
  res.history.push_back({0, fx[0].objective, fx[0].penalty, 0.0});

  int iter = 0;
  for (iter = 1; iter <= opts.max_iters; ++iter) {
    order();
    if (std::fabs(fx[dim].objective - fx[0].objective) <=
        opts.tol * (1.0 + std::fabs(fx[0].objective))) {
      res.converged = true;
      break;
    }
    std::vector<double> centroid(dim, 0.0);
    for (int v = 0; v < dim; ++v)
      for (int i = 0; i < dim; ++i) centroid[i] += verts[v][i] / dim;

    auto blend = [&](double coeff) {
      std::vector<double> y(dim);
      for (int i = 0; i < dim; ++i) y[i] = centroid[i] + coeff * (centroid[i] - verts[dim][i]);
      return y;
    };

    const std::vector<double> xr = blend(1.0);
    const ObjParts fr = fval(xr);
    if (fr.objective < fx[0].objective) {
      const std::vector<double> xe = blend(2.0);
      const ObjParts fe = fval(xe);
      if (fe.objective < fr.objective) {
        verts[dim] = xe;
        fx[dim] = fe;
      } else {
        verts[dim] = xr;
        fx[dim] = fr;
      }
    } else if (fr.objective < fx[dim - 1].objective) {
      verts[dim] = xr;
      fx[dim] = fr;
    } else {
      const bool outside = fr.objective < fx[dim].objective;
      const std::vector<double> xc = outside ? blend(0.5) : blend(-0.5);
      const ObjParts fc = fval(xc);
      if (fc.objective < (outside ? fr.objective : fx[dim].objective)) {
        verts[dim] = xc;
        fx[dim] = fc;
      } else {
        for (int v = 1; v <= dim; ++v) {
          for (int i = 0; i < dim; ++i) verts[v][i] = verts[0][i] + 0.5 * (verts[v][i] - verts[0][i]);
          fx[v] = fval(verts[v]);
        }
      }
    }
    order();
    if (fx[0].objective < best_seen) {
      best_seen = fx[0].objective;
      res.history.push_back({iter, fx[0].objective, fx[0].penalty, 0.0});
    }
  }
  order();
  res.best = to_control(verts[0]);
  res.best_cost = fx[0].objective;
  res.iters = std::min(iter, opts.max_iters);
  return res;
}

}  // namespace

OptResult minimize(const ProblemData& pd, int n, int m, const DiscreteControl& init,
                   const OptOptions& opts, const CostTargets* targets) {
  if (init.n() != n) throw std::invalid_argument("minimize: init control has wrong n");
  if (opts.max_iters < 1 || !(opts.grad_step > 0.0) || !(opts.step0 > 0.0) ||
      !(opts.tol > 0.0) || opts.penalty_weight < 0.0)
    throw std::invalid_argument("minimize: invalid options");
  if (opts.method == OptMethod::nelder_mead)
    return minimize_nelder_mead(pd, m, init, opts, targets);
  return minimize_gradient(pd, m, init, opts, targets);
}

}  // namespace stefanopt
