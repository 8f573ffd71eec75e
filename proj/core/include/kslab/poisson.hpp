#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "kslab/grid.hpp"

namespace kslab {

/// Aperiodic convolution of grid fields with translation-invariant kernels,
/// by zero padding to 2n cells per axis and FFT.
///
/// Kernels are sampled at offsets k h for k in [-n, n-1]^d and their spectra
/// cached by the caller, so each convolution costs one forward and one inverse
/// transform. Const methods are safe to call concurrently.
class FreeSpaceConvolver {
 public:
  using Spectrum = std::vector<std::complex<double>>;
  /// Kernel value at an offset vector; `origin` is true for the zero offset.
  using KernelFn = std::function<double(std::span<const double> offset, bool origin)>;

  /// Throws ConfigError for odd resolution or unsupported dimension.
  explicit FreeSpaceConvolver(const GridSpec& grid);
  ~FreeSpaceConvolver();
  FreeSpaceConvolver(const FreeSpaceConvolver&) = delete;
  FreeSpaceConvolver& operator=(const FreeSpaceConvolver&) = delete;
  FreeSpaceConvolver(FreeSpaceConvolver&&) noexcept;
  FreeSpaceConvolver& operator=(FreeSpaceConvolver&&) noexcept;

  const GridSpec& grid() const noexcept;

  /// Spectrum of the quadrature weights K(k h) h^d. With `unit_mass` the
  /// samples are rescaled to sum to one (for mollifiers).
  Spectrum kernel_spectrum(const KernelFn& kernel, bool unit_mass = false) const;
  Spectrum forward(std::span<const double> values) const;
  /// Inverse transform of field * kernel, restricted to the original grid.
  std::vector<double> inverse(const Spectrum& field, const Spectrum& kernel) const;
  /// One-shot convolution (forward + inverse).
  std::vector<double> convolve(std::span<const double> values, const Spectrum& kernel) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Mean of Phi over the cell [-h/2, h/2]^d, where the point sample is singular.
double green_origin_average(int dimension, double h);

/// Phi * V^eps as a radial profile: equals Phi(r) for r >= eps, finite at r = 0.
double mollified_potential_radial(int dimension, double eps, double r);

struct PoissonSolution {
  GridField potential;
  /// One field per axis: d c / d x_a.
  std::vector<GridField> gradient;
};

/// c = Phi * source on the whole space, and grad c = grad Phi * source.
/// The origin cell of Phi uses its analytic cell average; that of grad Phi is zero.
PoissonSolution poisson_free_space(const GridField& source);

}  // namespace kslab
