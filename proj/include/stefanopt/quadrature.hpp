#pragma once

#include <array>

namespace stefanopt {

// Gauss-Legendre nodes/weights on [-1, 1].
inline constexpr std::array<double, 2> kGauss2X{-0.5773502691896257, 0.5773502691896257};
inline constexpr std::array<double, 2> kGauss2W{1.0, 1.0};

inline constexpr std::array<double, 4> kGauss4X{-0.8611363115940526, -0.3399810435848563,
                                                0.3399810435848563, 0.8611363115940526};
inline constexpr std::array<double, 4> kGauss4W{0.34785484513745385, 0.6521451548625461,
                                                0.6521451548625461, 0.34785484513745385};

template <class F>
double gauss2(F&& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (int i = 0; i < 2; ++i) sum += kGauss2W[i] * f(mid + half * kGauss2X[i]);
  return half * sum;
}

template <class F>
double gauss4(F&& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (int i = 0; i < 4; ++i) sum += kGauss4W[i] * f(mid + half * kGauss4X[i]);
  return half * sum;
}

template <class F>
double composite_gauss4(F&& f, double a, double b, int panels) {
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double x0 = a + (b - a) * p / panels;
    const double x1 = a + (b - a) * (p + 1) / panels;
    sum += gauss4(f, x0, x1);
  }
  return sum;
}

}  // namespace stefanopt
