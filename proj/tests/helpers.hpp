#ifndef GFL_TESTS_HELPERS_HPP
#define GFL_TESTS_HELPERS_HPP

#include <cmath>
#include <numbers>
#include <vector>

#include "gfl/spectral.hpp"

namespace gfl::test {

inline double pi() { return std::numbers::pi; }

// n-th eigenvalue of the three-point Dirichlet Laplacian on M interior
// points of spacing h.
inline double discrete_box_eigenvalue(int n, int M, double h) {
  const double s = std::sin(n * pi() / (2.0 * (M + 1)));
  return 4.0 / (h * h) * s * s;
}

// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// One renormalized mode, X = |alpha|^2 ~ Exp(lambda), weight exp(-W (X - m)^2 / 2)
// with m = 1/lambda. Completing the square centres a Gaussian in X at
// c = m - lambda/W, truncated to X > 0.
inline double single_mode_z(double lambda, double W) {
  const double m = 1.0 / lambda;
  const double c = m - lambda / W;
  return lambda * std::exp(lambda * lambda / (2.0 * W) - lambda * m) * std::sqrt(pi() / (2.0 * W)) *
         std::erfc(-c * std::sqrt(W / 2.0));
}

inline double single_mode_first_moment(double lambda, double W) {
  const double c = 1.0 / lambda - lambda / W;
  const double mass = std::sqrt(pi() / (2.0 * W)) * std::erfc(-c * std::sqrt(W / 2.0));
  return c + std::exp(-0.5 * W * c * c) / (W * mass);
}

// 2 pi int_0^inf k dk / (exp((k^2 + kappa) / T) - 1) by composite Simpson.
inline double radial_rho0(double T, double kappa) {
  const double kmax = std::sqrt(60.0 * T);
  const int n = 200000;
  const double dk = kmax / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double k = i * dk;
    const double f = k / std::expm1((k * k + kappa) / T);
    s += (i == 0 || i == n ? 1.0 : (i % 2 ? 4.0 : 2.0)) * f;
  }
  return 2.0 * pi() * s * dk / 3.0;
}

}  // namespace gfl::test

#endif  // GFL_TESTS_HELPERS_HPP
