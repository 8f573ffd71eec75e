#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace kslab::detail {

/// x <- x + dt b + sqrt(2 sigma) dB. Every stepper in the library goes through
/// this one expression so coupled systems with equal drifts stay bit-identical.
inline void apply_update(std::span<double> x, const double* drift, double dt, double noise_scale,
                         const double* increment) noexcept {
  for (std::size_t a = 0; a < x.size(); ++a) {
    double v = x[a] + dt * drift[a];
    if (increment != nullptr) v += noise_scale * increment[a];
    x[a] = v;
  }
}

inline bool all_finite(std::span<const double> x) noexcept {
  for (double v : x) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace kslab::detail
