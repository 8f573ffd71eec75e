#pragma once

// Reference values computed without touching the library's own tables.

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <vector>

namespace oracle {

inline double bump(double s) { return s < 1.0 ? std::exp(-1.0 / (1.0 - s * s)) : 0.0; }

template <class F>
double integrate(F f, double a, double b, double tol = 1e-13) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 12, tol);
}

inline double sphere_area(int d) {
  return 2.0 * std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0);
}

/// c_d by adaptive radial quadrature.
inline double normalization(int d) {
  if (d == 1) return 1.0 / integrate([](double x) { return bump(std::abs(x)); }, -1.0, 1.0);
  const double radial = integrate([d](double t) { return std::pow(t, d - 1) * bump(t); }, 0.0, 1.0);
  return 1.0 / (sphere_area(d) * radial);
}

inline double mollifier(int d, double r, double eps) {
  return normalization(d) * bump(r / eps) / std::pow(eps, d);
}

/// Radial component of (grad Phi * V^eps)(x) at |x| = r, by direct convolution
/// in polar coordinates about the origin:
///   K(x) = -(1/|S|) int_S omega int_0^inf V^eps(x - rho omega) d rho d omega.
/// The inner integral runs over the chord of the support ball hit by the ray.
inline double conv_grad_radial(int d, double eps, double r) {
  const double c = normalization(d) / std::pow(eps, d);
  auto chord = [&](double theta) {
    const double ct = std::cos(theta);
    const double st = std::sin(theta);
    const double disc = eps * eps - r * r * st * st;
    if (disc <= 0.0) return 0.0;
    const double root = std::sqrt(disc);
    const double lo = std::max(0.0, r * ct - root);
    const double hi = r * ct + root;
    if (hi <= lo) return 0.0;
    return integrate(
        [&](double rho) {
          const double q2 = r * r - 2.0 * r * rho * ct + rho * rho;
          return c * bump(std::sqrt(std::max(q2, 0.0)) / eps);
        },
        lo, hi);
  };
  // Outside the ball only directions within the tangent cone see mass.
  const double cone = r > eps ? std::asin(eps / r) : std::numbers::pi;
  if (d == 2) {
    // x on the first axis: radial component = -(1/2pi) int cos(theta) F(theta).
    auto f = [&](double t) { return std::cos(t) * chord(t); };
    double total = 2.0 * integrate(f, 0.0, cone);
    return -total / (2.0 * std::numbers::pi);
  }
  // d = 3, axisymmetric about x: -(1/4pi) 2pi int cos sin F.
  auto f = [&](double t) { return std::cos(t) * std::sin(t) * chord(t); };
  const double total = 2.0 * std::numbers::pi * integrate(f, 0.0, cone);
  return -total / (4.0 * std::numbers::pi);
}

inline double gaussian_cell_average_1d(double mean, double s, double lo, double hi) {
  const double k = 1.0 / (std::sqrt(2.0) * s);
  return 0.5 * (std::erf((hi - mean) * k) - std::erf((lo - mean) * k)) / (hi - lo);
}

/// Barenblatt solution of d_t u = Delta(u^2) in d = 2 with unit mass.
inline double barenblatt_m2_d2(double t, double r) {
  const double c = 1.0 / std::sqrt(8.0 * std::numbers::pi);
  return std::max(0.0, c - r * r / (16.0 * std::sqrt(t))) / std::sqrt(t);
}

/// Potential of a unit Gaussian of width s in d = 3.
inline double gaussian_potential_3d(double s, double r) {
  if (r == 0.0) return std::sqrt(2.0 / std::numbers::pi) / (4.0 * std::numbers::pi * s);
  return std::erf(r / (std::sqrt(2.0) * s)) / (4.0 * std::numbers::pi * r);
}

}  // namespace oracle
