#pragma once

#include <array>

namespace kslab {

/// Porous-medium pressure p(u) = m/(m-1) u^{m-1}. Throws InvalidArgument for m <= 1.
double p_eval(double u, double m);

/// Derivative of order 0..3 of the uncut pressure at u > 0.
double p_derivative(double u, double m, int order);

/// Cutoff pressure p_lambda: constant p(lambda) below lambda, p itself on
/// [2 lambda, 1/lambda], constant p(2/lambda) above 2/lambda, joined by degree-7
/// Hermite blends on (lambda, 2 lambda) and (1/lambda, 2/lambda) that match value
/// and three derivatives at both band edges.
class CutoffPressure {
 public:
  /// Requires m == 2 or m >= 3 and 0 < lambda < 1/2 (disjoint bands).
  /// Throws InvalidArgument otherwise, or if a blend fails the monotonicity scan.
  CutoffPressure(double m, double lambda);

  double m() const noexcept { return m_; }
  double lambda() const noexcept { return lambda_; }

  double value(double r) const noexcept { return derivative(r, 0); }
  double first(double r) const noexcept { return derivative(r, 1); }
  double second(double r) const noexcept { return derivative(r, 2); }
  double third(double r) const noexcept { return derivative(r, 3); }

  /// Derivative of order 0..3 of p_lambda at r. r <= lambda (including r <= 0,
  /// which only arises from roundoff) falls in the lower flat region.
  double derivative(double r, int order) const noexcept;

  /// sup of |p_lambda^{(order)}| over [lo, hi], by dense sampling plus endpoints.
  double sup_abs_derivative(double lo, double hi, int order, int samples = 4096) const;

 private:
  struct Blend {
    double start = 0.0;
    double width = 1.0;
    std::array<double, 8> coef{};  // in t = (r - start)/width
    std::array<double, 8> tail{};  // in t - 1

    double derivative(double r, int order) const noexcept;
  };

  static Blend make_blend(double start, double width, const std::array<double, 4>& left,
                          const std::array<double, 4>& right);

  double m_;
  double lambda_;
  double p_low_;
  double p_high_;
  double p_2lambda_;
  double p_inv_lambda_;
  Blend lower_;
  Blend upper_;
};

}  // namespace kslab
