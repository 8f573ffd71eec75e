#pragma once

#include <cstddef>
#include <span>

namespace kslab {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// Half-width of the ~95% interval on the slope (1.96 standard errors).
  double slope_half_width = 0.0;
  std::size_t points = 0;
};

/// Weighted least squares y ~ intercept + slope * x.
///
/// `weights` may be empty (unweighted). The slope covariance is scaled by the
/// reduced residual chi-square, so exact data gives a zero half-width.
/// Throws DegenerateFitError when fewer than two distinct x values carry weight.
LineFit fit_line(std::span<const double> x, std::span<const double> y,
                 std::span<const double> weights = {});

/// Fits log(y) against log(x). All x and y must be positive.
LineFit fit_loglog(std::span<const double> x, std::span<const double> y,
                   std::span<const double> weights = {});

}  // namespace kslab
