#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace kslab {

/// Surface measure of the unit sphere S^{d-1} in R^d (2 for d = 1).
double unit_sphere_area(int dimension);

/// Constant c_d making c_d * exp(-1/(1-|x|^2)) a unit-mass density on the unit ball.
double mollifier_normalization(int dimension);

/// Unnormalized bump profile exp(-1/(1-s^2)) on s < 1, zero elsewhere.
double bump_profile(double s) noexcept;

class Mollifier;

/// Process-wide immutable mollifier for dimension 1..3, built on first use.
const Mollifier& shared_mollifier(int dimension);

/// Radial bump mollifier V and its rescalings V^eps(x) = eps^-d V(x/eps).
///
/// Holds a table of the enclosed mass M(r) = int_{|y|<=r} V(y) dy on [0, 1],
/// stored as q(s) = M(s)/s^d with exact node derivatives and evaluated by cubic
/// Hermite interpolation. The ratio form keeps relative accuracy as r -> 0.
class Mollifier {
 public:
  static constexpr std::size_t kTableIntervals = 1024;

  explicit Mollifier(int dimension);

  int dimension() const noexcept { return dim_; }
  double normalization() const noexcept { return norm_; }

  double radial(double r, double eps) const noexcept;
  /// d/dr and d^2/dr^2 of the radial profile of V^eps.
  double radial_derivative(double r, double eps) const noexcept;
  double radial_second_derivative(double r, double eps) const noexcept;

  double eval(std::span<const double> x, double eps) const;
  void grad(std::span<const double> x, double eps, std::span<double> out) const;

  /// grad V^eps(x) = gradient_factor(|x|^2, eps) * x.
  double gradient_factor(double r2, double eps) const noexcept;

  double enclosed_mass(double r, double eps) const noexcept;
  /// q(s) = M_1(s)/s^d for s in [0, 1]; q(s) = s^-d beyond.
  double mass_ratio(double s) const noexcept {
    if (s >= 1.0) return 1.0 / std::pow(s, dim_);
    const double pos = s * static_cast<double>(kTableIntervals);
    const std::size_t k =
        pos < static_cast<double>(kTableIntervals - 1) ? static_cast<std::size_t>(pos)
                                                       : kTableIntervals - 1;
    const double t = pos - static_cast<double>(k);
    const double t2 = t * t;
    const double t3 = t2 * t;
    constexpr double h = 1.0 / static_cast<double>(kTableIntervals);
    return (2.0 * t3 - 3.0 * t2 + 1.0) * q_[k] + h * (t3 - 2.0 * t2 + t) * dq_[k] +
           (-2.0 * t3 + 3.0 * t2) * q_[k + 1] + h * (t3 - t2) * dq_[k + 1];
  }

  /// sup |grad V| and sup ||D^2 V|| (spectral norm) for eps = 1.
  double sup_gradient() const noexcept { return sup_grad_; }
  double sup_hessian() const noexcept { return sup_hess_; }

 private:
  int dim_;
  double norm_;
  double area_;
  std::vector<double> q_;
  std::vector<double> dq_;
  double sup_grad_ = 0.0;
  double sup_hess_ = 0.0;
};

/// Free-space Green's function of -Laplace.
class CoulombKernel {
 public:
  explicit CoulombKernel(int dimension);

  int dimension() const noexcept { return dim_; }
  /// C_d for d >= 3; 1/(2 pi) for d = 2 (the coefficient of -ln|x|).
  double constant() const noexcept { return constant_; }

  double phi(std::span<const double> x) const;
  void grad(std::span<const double> x, std::span<double> out) const;

  /// Radial form: Phi(r), Phi'(r), Phi''(r) for r > 0.
  double phi_radial(double r) const noexcept;
  double phi_radial_derivative(double r) const noexcept;
  double phi_radial_second_derivative(double r) const noexcept;

  /// grad Phi(x) = gradient_factor(|x|^2) * x for x != 0.
  double gradient_factor(double r2) const noexcept;

 private:
  int dim_;
  double constant_;
  double inv_area_;
};

/// grad(Phi * V^eps) evaluated through the shell theorem:
/// grad Phi^eps(x) = M(|x|) grad Phi(x), which equals grad Phi exactly for |x| >= eps.
class MollifiedCoulomb {
 public:
  MollifiedCoulomb(int dimension, double eps);

  int dimension() const noexcept { return base_.dimension(); }
  double eps() const noexcept { return eps_; }
  const CoulombKernel& base() const noexcept { return base_; }
  const Mollifier& mollifier() const noexcept { return mollifier_; }

  void grad(std::span<const double> x, std::span<double> out) const;

  /// grad Phi^eps(x) = gradient_factor(|x|^2) * x; finite at x = 0.
  double gradient_factor(double r2) const noexcept {
    if (r2 >= eps2_) return far_factor(r2);
    const double s = std::sqrt(r2) * inv_eps_;
    return -inv_area_ * inv_eps_d_ * mollifier_.mass_ratio(s);
  }

  /// |grad Phi^eps| at radius r.
  double gradient_norm(double r) const noexcept;
  /// Spectral norm of D^2 Phi^eps at radius r > 0.
  double hessian_norm(double r) const noexcept;

 private:
  double far_factor(double r2) const noexcept;

  CoulombKernel base_;
  Mollifier mollifier_;
  double eps_;
  double eps2_;
  double inv_eps_;
  double inv_eps_d_;
  double inv_area_;
};

struct KernelBoundFit {
  std::vector<double> eps;
  std::vector<double> sup_gradient;
  std::vector<double> sup_hessian;
  double gradient_slope = 0.0;
  double hessian_slope = 0.0;
};

/// Fits the scaling exponents of sup|grad Phi^eps| and sup||D^2 Phi^eps|| in eps.
/// Suprema are taken over a radial grid on (0, 2 eps]; throws DegenerateFitError
/// for fewer than two distinct eps values.
KernelBoundFit kernel_bound_probe(int dimension, std::span<const double> eps_list,
                                  std::size_t radial_points = 20000);

}  // namespace kslab
