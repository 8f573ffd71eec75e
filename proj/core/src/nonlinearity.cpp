#include "kslab/nonlinearity.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "kslab/error.hpp"

namespace kslab {
namespace {

// k!/(k-n)!
double falling(int k, int n) noexcept {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= static_cast<double>(k - i);
  return r;
}

}  // namespace

double p_eval(double u, double m) {
  if (!(m > 1.0)) throw InvalidArgument("pressure exponent m must exceed 1");
  if (u <= 0.0) return 0.0;
  return m / (m - 1.0) * std::pow(u, m - 1.0);
}

double p_derivative(double u, double m, int order) {
  if (!(m > 1.0)) throw InvalidArgument("pressure exponent m must exceed 1");
  switch (order) {
    case 0:
      return p_eval(u, m);
    case 1:
      return m * std::pow(u, m - 2.0);
    case 2:
      return m * (m - 2.0) * std::pow(u, m - 3.0);
    case 3:
      return m * (m - 2.0) * (m - 3.0) * std::pow(u, m - 4.0);
    default:
      throw InvalidArgument("pressure derivative order must be 0..3");
  }
}

double CutoffPressure::Blend::derivative(double r, int order) const noexcept {
  double t = (r - start) / width;
  const std::array<double, 8>* c = &coef;
  // Expand about the nearer edge; both edge expansions start with exact edge data.
  if (t > 0.5) {
    t -= 1.0;
    c = &tail;
  }
  double acc = 0.0;
  for (int k = 7; k >= order; --k) acc = acc * t + (*c)[k] * falling(k, order);
  return acc / std::pow(width, order);
}

CutoffPressure::Blend CutoffPressure::make_blend(double start, double width,
                                                 const std::array<double, 4>& left,
                                                 const std::array<double, 4>& right) {
  Blend b;
  b.start = start;
  b.width = width;
  // Lower half fixed by the left derivatives (scaled to t units).
  double factorial = 1.0;
  for (int k = 0; k < 4; ++k) {
    if (k > 0) factorial *= k;
    b.coef[k] = left[k] * std::pow(width, k) / factorial;
  }
  // Upper half t^4..t^7 solves the four right-edge conditions.
  Eigen::Matrix4d a;
  Eigen::Vector4d rhs;
  for (int j = 0; j < 4; ++j) {
    double known = 0.0;
    for (int k = j; k < 4; ++k) known += b.coef[k] * falling(k, j);
    rhs[j] = right[j] * std::pow(width, j) - known;
    for (int i = 0; i < 4; ++i) a(j, i) = falling(4 + i, j);
  }
  const Eigen::Vector4d upper = a.fullPivLu().solve(rhs);
  for (int i = 0; i < 4; ++i) b.coef[4 + i] = upper[i];

  // Same polynomial in (t - 1): exact right data below degree 4, binomial shift above.
  factorial = 1.0;
  for (int j = 0; j < 8; ++j) {
    if (j > 0) factorial *= j;
    if (j < 4) {
      b.tail[j] = right[j] * std::pow(width, j) / factorial;
    } else {
      double sum = 0.0;
      for (int k = j; k < 8; ++k) sum += b.coef[k] * falling(k, j) / factorial;
      b.tail[j] = sum;
    }
  }
  return b;
}

CutoffPressure::CutoffPressure(double m, double lambda) : m_(m), lambda_(lambda) {
  if (!(m == 2.0 || m >= 3.0)) throw InvalidArgument("m must be 2 or >= 3");
  if (!(lambda > 0.0 && lambda < 0.5)) {
    throw InvalidArgument("cutoff lambda must lie in (0, 1/2) so the blend bands are disjoint");
  }
  p_low_ = p_eval(lambda, m);
  p_high_ = p_eval(2.0 / lambda, m);

  const std::array<double, 4> flat_low{p_low_, 0.0, 0.0, 0.0};
  const std::array<double, 4> flat_high{p_high_, 0.0, 0.0, 0.0};
  std::array<double, 4> at_2lambda{}, at_inv_lambda{};
  for (int k = 0; k < 4; ++k) {
    at_2lambda[k] = p_derivative(2.0 * lambda, m, k);
    at_inv_lambda[k] = p_derivative(1.0 / lambda, m, k);
  }
  p_2lambda_ = at_2lambda[0];
  p_inv_lambda_ = at_inv_lambda[0];
  lower_ = make_blend(lambda, lambda, flat_low, at_2lambda);
  upper_ = make_blend(1.0 / lambda, 1.0 / lambda, at_inv_lambda, flat_high);

  for (const Blend* blend : {&lower_, &upper_}) {
    const double scale = std::max(std::abs(blend->derivative(blend->start, 1)),
                                  std::abs(blend->derivative(blend->start + blend->width, 1)));
    constexpr int kScan = 4096;
    for (int j = 0; j <= kScan; ++j) {
      const double r = blend->start + blend->width * j / kScan;
      if (blend->derivative(r, 1) < -1e-12 * std::max(scale, 1.0)) {
        throw InvalidArgument("cutoff pressure blend is not monotone for this (m, lambda)");
      }
    }
  }
}

double CutoffPressure::derivative(double r, int order) const noexcept {
  if (r <= lambda_) return order == 0 ? p_low_ : 0.0;
  // Values are clamped to the band's range so roundoff cannot break monotonicity.
  if (r < 2.0 * lambda_) {
    const double v = lower_.derivative(r, order);
    return order == 0 ? std::clamp(v, p_low_, p_2lambda_) : v;
  }
  if (r <= 1.0 / lambda_) {
    switch (order) {
      case 0:
        return m_ / (m_ - 1.0) * std::pow(r, m_ - 1.0);
      case 1:
        return m_ * std::pow(r, m_ - 2.0);
      case 2:
        return m_ * (m_ - 2.0) * std::pow(r, m_ - 3.0);
      default:
        return m_ * (m_ - 2.0) * (m_ - 3.0) * std::pow(r, m_ - 4.0);
    }
  }
  if (r < 2.0 / lambda_) {
    const double v = upper_.derivative(r, order);
    return order == 0 ? std::clamp(v, p_inv_lambda_, p_high_) : v;
  }
  return order == 0 ? p_high_ : 0.0;
}

double CutoffPressure::sup_abs_derivative(double lo, double hi, int order, int samples) const {
  if (!(hi >= lo) || samples < 1) throw InvalidArgument("sup_abs_derivative: bad range");
  double sup = 0.0;
  for (int j = 0; j <= samples; ++j) {
    const double r = lo + (hi - lo) * j / samples;
    sup = std::max(sup, std::abs(derivative(r, order)));
  }
  // Band edges carry the extreme derivatives of the blends.
  for (double edge : {lambda_, 2.0 * lambda_, 1.0 / lambda_, 2.0 / lambda_}) {
    if (edge >= lo && edge <= hi) sup = std::max(sup, std::abs(derivative(edge, order)));
  }
  return sup;
}

}  // namespace kslab
