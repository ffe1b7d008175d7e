#include "stefanopt/fem.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "stefanopt/quadrature.hpp"

namespace stefanopt {

Mesh1D Mesh1D::uniform(double s_k, int m) {
  if (m < 1) throw std::invalid_argument("mesh needs at least one element");
  if (!(s_k > 0.0)) throw std::invalid_argument("mesh endpoint must be positive");
  Mesh1D mesh;
  mesh.nodes.resize(m + 1);
  for (int i = 0; i <= m; ++i) mesh.nodes[i] = s_k * i / m;
  return mesh;
}

double stability_threshold(double M, double a0) {
  if (M < 0.0) throw std::invalid_argument("M must be nonnegative");
  if (!(a0 > 0.0)) throw std::invalid_argument("a0 must be positive");
  if (M == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / (M * M / (2.0 * a0) + M);
}

double sampled_coefficient_bound(const ProblemData& pd, int samples) {
  if (samples < 2) throw std::invalid_argument("samples must be >= 2");
  double M = 0.0;
  for (int i = 0; i < samples; ++i) {
    for (int j = 0; j < samples; ++j) {
      const double x = pd.l * i / (samples - 1);
      const double t = pd.T * j / (samples - 1);
      M = std::max({M, std::fabs(pd.a(x, t)), std::fabs(pd.b(x, t)), std::fabs(pd.c(x, t))});
    }
  }
  return M;
}

StepSystem assemble_step(const ProblemData& pd, int k, double s_k, int m, double tau,
                         const std::function<double(double)>& u_prev, double gs_k, double chi_k,
                         double g_k) {
  if (m < 2) throw std::invalid_argument("assemble_step needs m >= 2");
  if (!(tau > 0.0)) throw std::invalid_argument("assemble_step needs tau > 0");
  if (!(s_k >= pd.delta && s_k <= pd.l))
    throw std::invalid_argument("assemble_step: s_k outside [delta, l]");

  StepSystem sys;
  sys.mesh = Mesh1D::uniform(s_k, m);
  sys.sub.assign(m + 1, 0.0);
  sys.diag.assign(m + 1, 0.0);
  sys.super.assign(m + 1, 0.0);
  sys.rhs.assign(m + 1, 0.0);

  const double h = sys.mesh.h();
  const double inv_h = 1.0 / h;
  for (int e = 0; e < m; ++e) {
    const double x0 = sys.mesh.nodes[e];
    const double x1 = sys.mesh.nodes[e + 1];
    const double mid = 0.5 * (x0 + x1);
    const double half = 0.5 * (x1 - x0);
    for (int q = 0; q < 2; ++q) {
      const double xq = mid + half * kGauss2X[q];
      const double w = half * kGauss2W[q];
      const double ak = steklov_average(pd.a, xq, k, tau);
      const double bk = steklov_average(pd.b, xq, k, tau);
      const double ck = steklov_average(pd.c, xq, k, tau);
      const double fk = steklov_average(pd.f, xq, k, tau);

      const double p0 = (x1 - xq) * inv_h;  // hat at node e
      const double p1 = (xq - x0) * inv_h;  // hat at node e+1
      const double d0 = -inv_h;
      const double d1 = inv_h;

      // A(i,j): row i = test hat, column j = trial hat.
      sys.diag[e] += w * (ak * d0 * d0 - bk * d0 * p0 - ck * p0 * p0 + p0 * p0 / tau);
      sys.super[e] += w * (ak * d1 * d0 - bk * d1 * p0 - ck * p1 * p0 + p1 * p0 / tau);
      sys.sub[e + 1] += w * (ak * d0 * d1 - bk * d0 * p1 - ck * p0 * p1 + p0 * p1 / tau);
      sys.diag[e + 1] += w * (ak * d1 * d1 - bk * d1 * p1 - ck * p1 * p1 + p1 * p1 / tau);

      const double load = u_prev(xq) / tau - fk;
      sys.rhs[e] += w * load * p0;
      sys.rhs[e + 1] += w * load * p1;
    }
  }

  sys.rhs[m] -= gs_k - chi_k;
  sys.rhs[0] -= g_k;
  return sys;
}

double residual_inf(const StepSystem& sys, std::span<const double> u) {
  const int n = static_cast<int>(sys.diag.size());
  double r = 0.0;
  for (int i = 0; i < n; ++i) {
    double v = sys.diag[i] * u[i] - sys.rhs[i];
    if (i > 0) v += sys.sub[i] * u[i - 1];
    if (i + 1 < n) v += sys.super[i] * u[i + 1];
    r = std::max(r, std::fabs(v));
  }
  return r;
}

namespace {

// Dense Gaussian elimination with partial pivoting, used when the Thomas
// pass hits a near-zero pivot or leaves a bad residual.
std::vector<double> dense_solve(const StepSystem& sys) {
  const int n = static_cast<int>(sys.diag.size());
  std::vector<std::vector<double>> A(n, std::vector<double>(n + 1, 0.0));
  for (int i = 0; i < n; ++i) {
    A[i][i] = sys.diag[i];
    if (i > 0) A[i][i - 1] = sys.sub[i];
    if (i + 1 < n) A[i][i + 1] = sys.super[i];
    A[i][n] = sys.rhs[i];
  }
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::fabs(A[r][col]) > std::fabs(A[piv][col])) piv = r;
    if (A[piv][col] == 0.0) throw std::runtime_error("singular step system");
    std::swap(A[col], A[piv]);
    for (int r = col + 1; r < n; ++r) {
      const double factor = A[r][col] / A[col][col];
      if (factor == 0.0) continue;
      for (int cc = col; cc <= n; ++cc) A[r][cc] -= factor * A[col][cc];
    }
  }
  std::vector<double> u(n);
  for (int i = n - 1; i >= 0; --i) {
    double acc = A[i][n];
    for (int j = i + 1; j < n; ++j) acc -= A[i][j] * u[j];
    u[i] = acc / A[i][i];
  }
  return u;
}

bool thomas_solve(const StepSystem& sys, std::vector<double>& u) {
  const int n = static_cast<int>(sys.diag.size());
  std::vector<double> cp(n, 0.0), dp(n, 0.0);
  double piv = sys.diag[0];
  double scale = std::fabs(sys.diag[0]) + std::fabs(sys.super[0]);
  if (std::fabs(piv) < 1e-14 * std::max(scale, 1.0)) return false;
  cp[0] = sys.super[0] / piv;
  dp[0] = sys.rhs[0] / piv;
  for (int i = 1; i < n; ++i) {
    piv = sys.diag[i] - sys.sub[i] * cp[i - 1];
    scale = std::fabs(sys.diag[i]) + std::fabs(sys.sub[i]) +
            (i + 1 < n ? std::fabs(sys.super[i]) : 0.0);
    if (std::fabs(piv) < 1e-14 * std::max(scale, 1.0)) return false;
    if (i + 1 < n) cp[i] = sys.super[i] / piv;
    dp[i] = (sys.rhs[i] - sys.sub[i] * dp[i - 1]) / piv;
  }
  u.assign(n, 0.0);
  u[n - 1] = dp[n - 1];
  for (int i = n - 2; i >= 0; --i) u[i] = dp[i] - cp[i] * u[i + 1];
  return true;
}

}  // namespace

std::vector<double> solve_step(const StepSystem& sys) {
  double bnorm = 0.0;
  for (double v : sys.rhs) bnorm = std::max(bnorm, std::fabs(v));
  const double tol = 1e-10 * (1.0 + bnorm);

  std::vector<double> u;
  if (thomas_solve(sys, u) && residual_inf(sys, u) <= tol) return u;

  u = dense_solve(sys);
  if (residual_inf(sys, u) > tol) throw std::runtime_error("step solve failed residual check");
  return u;
}

}  // namespace stefanopt
