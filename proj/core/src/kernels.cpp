#include "kslab/kernels.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numbers>

#include "kslab/error.hpp"
#include "kslab/fit.hpp"

namespace kslab {
namespace {

using Gauss20 = boost::math::quadrature::gauss<double, 20>;

double norm2(std::span<const double> x) noexcept {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

// f(s) = exp(-1/(1-s^2)) and its first two derivatives for s in [0, 1).
double profile_d1(double s) noexcept {
  if (s >= 1.0) return 0.0;
  const double w = 1.0 - s * s;
  return -2.0 * s * std::exp(-1.0 / w) / (w * w);
}

double profile_d2(double s) noexcept {
  if (s >= 1.0) return 0.0;
  const double w = 1.0 - s * s;
  const double s2 = s * s;
  return std::exp(-1.0 / w) * (6.0 * s2 * s2 - 2.0) / (w * w * w * w);
}

double ipow(double x, int k) noexcept {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

}  // namespace

double bump_profile(double s) noexcept {
  if (s >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - s * s));
}

double unit_sphere_area(int dimension) {
  if (dimension < 1) throw InvalidArgument("dimension must be >= 1");
  const double half = 0.5 * dimension;
  return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

double mollifier_normalization(int dimension) { return Mollifier(dimension).normalization(); }

const Mollifier& shared_mollifier(int dimension) {
  static const Mollifier d1(1), d2(2), d3(3);
  switch (dimension) {
    case 1:
      return d1;
    case 2:
      return d2;
    case 3:
      return d3;
    default:
      throw InvalidArgument("shared_mollifier supports dimensions 1..3");
  }
}

Mollifier::Mollifier(int dimension) : dim_(dimension) {
  if (dimension < 1) throw InvalidArgument("mollifier dimension must be >= 1");
  area_ = unit_sphere_area(dim_);

  const std::size_t n = kTableIntervals;
  const double h = 1.0 / static_cast<double>(n);
  const auto radial_integrand = [d = dim_](double t) {
    return ipow(t, d - 1) * bump_profile(t);
  };

  // Cumulative radial integral I(s_k) = int_0^{s_k} t^{d-1} f(t) dt.
  std::vector<double> cumulative(n + 1, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double a = static_cast<double>(k) * h;
    const double b = static_cast<double>(k + 1) * h;
    cumulative[k + 1] = cumulative[k] + Gauss20::integrate(radial_integrand, a, b);
  }
  const double total = cumulative[n];
  norm_ = 1.0 / (area_ * total);

  q_.assign(n + 1, 0.0);
  dq_.assign(n + 1, 0.0);
  q_[0] = bump_profile(0.0) / (static_cast<double>(dim_) * total);
  for (std::size_t k = 1; k <= n; ++k) {
    const double s = static_cast<double>(k) * h;
    q_[k] = cumulative[k] / (total * ipow(s, dim_));
    dq_[k] = (bump_profile(s) / total - dim_ * q_[k]) / s;
  }
  q_[n] = 1.0;

  constexpr int kScan = 100000;
  for (int j = 1; j < kScan; ++j) {
    const double s = static_cast<double>(j) / kScan;
    const double d1 = std::abs(profile_d1(s));
    const double d2 = std::abs(profile_d2(s));
    sup_grad_ = std::max(sup_grad_, norm_ * d1);
    sup_hess_ = std::max(sup_hess_, norm_ * std::max(d2, d1 / s));
  }
}

double Mollifier::radial(double r, double eps) const noexcept {
  return norm_ * bump_profile(r / eps) / ipow(eps, dim_);
}

double Mollifier::radial_derivative(double r, double eps) const noexcept {
  return norm_ * profile_d1(r / eps) / ipow(eps, dim_ + 1);
}

double Mollifier::radial_second_derivative(double r, double eps) const noexcept {
  return norm_ * profile_d2(r / eps) / ipow(eps, dim_ + 2);
}

double Mollifier::eval(std::span<const double> x, double eps) const {
  return radial(std::sqrt(norm2(x)), eps);
}

void Mollifier::grad(std::span<const double> x, double eps, std::span<double> out) const {
  const double factor = gradient_factor(norm2(x), eps);
  for (std::size_t a = 0; a < x.size(); ++a) out[a] = factor * x[a];
}

double Mollifier::gradient_factor(double r2, double eps) const noexcept {
  const double s2 = r2 / (eps * eps);
  if (s2 >= 1.0) return 0.0;
  const double w = 1.0 - s2;
  return -2.0 * norm_ * std::exp(-1.0 / w) / (w * w * ipow(eps, dim_ + 2));
}

double Mollifier::enclosed_mass(double r, double eps) const noexcept {
  const double s = r / eps;
  if (s >= 1.0) return 1.0;
  return std::min(1.0, ipow(s, dim_) * mass_ratio(s));
}

CoulombKernel::CoulombKernel(int dimension) : dim_(dimension) {
  if (dimension < 2) throw InvalidArgument("Coulomb kernel requires dimension >= 2");
  inv_area_ = 1.0 / unit_sphere_area(dim_);
  if (dim_ == 2) {
    constant_ = 1.0 / (2.0 * std::numbers::pi);
  } else {
    const double half = 0.5 * dim_;
    constant_ = std::tgamma(half + 1.0) / (dim_ * (dim_ - 2) * std::pow(std::numbers::pi, half));
  }
}

double CoulombKernel::phi_radial(double r) const noexcept {
  if (dim_ == 2) return -constant_ * std::log(r);
  return constant_ * ipow(1.0 / r, dim_ - 2);
}

double CoulombKernel::phi_radial_derivative(double r) const noexcept {
  return -inv_area_ / ipow(r, dim_ - 1);
}

double CoulombKernel::phi_radial_second_derivative(double r) const noexcept {
  return (dim_ - 1) * inv_area_ / ipow(r, dim_);
}

double CoulombKernel::gradient_factor(double r2) const noexcept {
  if (dim_ == 2) return -inv_area_ / r2;
  if (dim_ == 3) return -inv_area_ / (r2 * std::sqrt(r2));
  return -inv_area_ / std::pow(r2, 0.5 * dim_);
}

double CoulombKernel::phi(std::span<const double> x) const {
  const double r2 = norm2(x);
  if (r2 == 0.0) throw SingularityError("Phi evaluated at the origin");
  return phi_radial(std::sqrt(r2));
}

void CoulombKernel::grad(std::span<const double> x, std::span<double> out) const {
  const double r2 = norm2(x);
  if (r2 == 0.0) throw SingularityError("grad Phi evaluated at the origin");
  const double factor = gradient_factor(r2);
  for (std::size_t a = 0; a < x.size(); ++a) out[a] = factor * x[a];
}

MollifiedCoulomb::MollifiedCoulomb(int dimension, double eps)
    : base_(dimension), mollifier_(dimension), eps_(eps) {
  if (!(eps > 0.0)) throw InvalidArgument("mollification width must be positive");
  eps2_ = eps * eps;
  inv_eps_ = 1.0 / eps;
  inv_eps_d_ = ipow(inv_eps_, dimension);
  inv_area_ = 1.0 / unit_sphere_area(dimension);
}

double MollifiedCoulomb::far_factor(double r2) const noexcept {
  return base_.gradient_factor(r2);
}

void MollifiedCoulomb::grad(std::span<const double> x, std::span<double> out) const {
  const double factor = gradient_factor(norm2(x));
  for (std::size_t a = 0; a < x.size(); ++a) out[a] = factor * x[a];
}

double MollifiedCoulomb::gradient_norm(double r) const noexcept {
  return std::abs(gradient_factor(r * r)) * r;
}

double MollifiedCoulomb::hessian_norm(double r) const noexcept {
  const int d = dimension();
  // M(r)/r^d, finite as r -> 0.
  const double mass_over_rd =
      r >= eps_ ? 1.0 / ipow(r, d) : inv_eps_d_ * mollifier_.mass_ratio(r * inv_eps_);
  const double radial = -mollifier_.radial(r, eps_) + (d - 1) * inv_area_ * mass_over_rd;
  const double tangential = -inv_area_ * mass_over_rd;
  return std::max(std::abs(radial), std::abs(tangential));
}

KernelBoundFit kernel_bound_probe(int dimension, std::span<const double> eps_list,
                                  std::size_t radial_points) {
  KernelBoundFit out;
  for (double eps : eps_list) {
    const MollifiedCoulomb kernel(dimension, eps);
    double sup_g = 0.0, sup_h = 0.0;
    for (std::size_t j = 1; j <= radial_points; ++j) {
      const double r = 2.0 * eps * static_cast<double>(j) / static_cast<double>(radial_points);
      sup_g = std::max(sup_g, kernel.gradient_norm(r));
      sup_h = std::max(sup_h, kernel.hessian_norm(r));
    }
    out.eps.push_back(eps);
    out.sup_gradient.push_back(sup_g);
    out.sup_hessian.push_back(sup_h);
  }
  out.gradient_slope = fit_loglog(out.eps, out.sup_gradient).slope;
  out.hessian_slope = fit_loglog(out.eps, out.sup_hessian).slope;
  return out;
}

}  // namespace kslab
