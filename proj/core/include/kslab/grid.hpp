#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace kslab {

/// Uniform cell-centered grid on the box [-L, L]^d with n cells per axis.
/// Flat storage is row-major: the last axis varies fastest.
struct GridSpec {
  int dimension = 2;
  std::size_t resolution = 64;
  double half_width = 1.0;

  double spacing() const noexcept { return 2.0 * half_width / static_cast<double>(resolution); }
  double cell_volume() const noexcept;
  std::size_t cells() const noexcept;
  std::size_t stride(int axis) const noexcept;
  double center(std::size_t j) const noexcept {
    return -half_width + (static_cast<double>(j) + 0.5) * spacing();
  }
  /// Per-axis cell indices of a flat index.
  void unravel(std::size_t index, std::span<std::size_t> out) const noexcept;

  bool operator==(const GridSpec&) const = default;
};

struct GridField {
  GridSpec grid;
  double time = 0.0;
  std::vector<double> values;

  GridField() = default;
  explicit GridField(const GridSpec& spec, double t = 0.0)
      : grid(spec), time(t), values(spec.cells(), 0.0) {}

  double mass() const noexcept;
  double min_value() const noexcept;
};

/// Multilinear interpolation of cell-center values. Throws OutOfDomainError
/// unless x lies at least 1.5 cells inside the box on every axis.
double interpolate_field(const GridField& field, std::span<const double> x);

/// Multilinear interpolation of centered-difference node gradients; exact on
/// affine fields. Same domain rule as interpolate_field.
void interpolate_gradient(const GridField& field, std::span<const double> x,
                          std::span<double> out);

/// Value and gradient in one pass over the same stencil.
double interpolate_value_and_gradient(const GridField& field, std::span<const double> x,
                                      std::span<double> gradient);

}  // namespace kslab
