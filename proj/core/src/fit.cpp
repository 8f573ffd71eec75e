#include "kslab/fit.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "kslab/error.hpp"

namespace kslab {

LineFit fit_line(std::span<const double> x, std::span<const double> y,
                 std::span<const double> weights) {
  if (x.size() != y.size() || (!weights.empty() && weights.size() != x.size())) {
    throw InvalidArgument("fit_line: mismatched input lengths");
  }
  const std::size_t n = x.size();
  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    sw += w;
    sx += w * x[i];
    sy += w * y[i];
  }
  if (n < 2 || sw <= 0.0) throw DegenerateFitError("fit_line: need at least two points");
  const double xm = sx / sw;
  const double ym = sy / sw;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    sxx += w * (x[i] - xm) * (x[i] - xm);
    sxy += w * (x[i] - xm) * (y[i] - ym);
  }
  // Relative test: x values that agree to rounding are one point.
  double xscale = 0.0;
  for (double xi : x) xscale = std::max(xscale, std::abs(xi));
  if (!(sxx > 1e-24 * sw * std::max(1.0, xscale * xscale))) {
    throw DegenerateFitError("fit_line: fewer than two distinct abscissae");
  }

  LineFit fit;
  fit.points = n;
  fit.slope = sxy / sxx;
  fit.intercept = ym - fit.slope * xm;
  if (n > 2) {
    double chi2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double w = weights.empty() ? 1.0 : weights[i];
      const double r = y[i] - fit.intercept - fit.slope * x[i];
      chi2 += w * r * r;
    }
    const double var_slope = (chi2 / static_cast<double>(n - 2)) / sxx;
    fit.slope_half_width = 1.96 * std::sqrt(var_slope);
  }
  return fit;
}

LineFit fit_loglog(std::span<const double> x, std::span<const double> y,
                   std::span<const double> weights) {
  if (x.size() != y.size()) throw InvalidArgument("fit_loglog: mismatched input lengths");
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      throw InvalidArgument("fit_loglog: values must be positive");
    }
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return fit_line(lx, ly, weights);
}

}  // namespace kslab
