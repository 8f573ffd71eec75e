#include "kslab/grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "kslab/error.hpp"

namespace kslab {

double GridSpec::cell_volume() const noexcept { return std::pow(spacing(), dimension); }

std::size_t GridSpec::cells() const noexcept {
  std::size_t total = 1;
  for (int a = 0; a < dimension; ++a) total *= resolution;
  return total;
}

std::size_t GridSpec::stride(int axis) const noexcept {
  std::size_t s = 1;
  for (int a = dimension - 1; a > axis; --a) s *= resolution;
  return s;
}

void GridSpec::unravel(std::size_t index, std::span<std::size_t> out) const noexcept {
  for (int a = dimension - 1; a >= 0; --a) {
    out[a] = index % resolution;
    index /= resolution;
  }
}

double GridField::mass() const noexcept {
  double total = 0.0;
  for (double v : values) total += v;
  return total * grid.cell_volume();
}

double GridField::min_value() const noexcept {
  return values.empty() ? 0.0 : *std::min_element(values.begin(), values.end());
}

namespace {

constexpr int kMaxDim = 3;

struct Stencil {
  std::array<std::size_t, kMaxDim> base{};
  std::array<double, kMaxDim> frac{};
};

Stencil locate(const GridSpec& g, std::span<const double> x) {
  if (static_cast<int>(x.size()) != g.dimension || g.dimension > kMaxDim) {
    throw InvalidArgument("interpolation point has the wrong dimension");
  }
  const double h = g.spacing();
  const double upper = static_cast<double>(g.resolution) - 2.0;
  Stencil s;
  for (int a = 0; a < g.dimension; ++a) {
    const double xi = (x[a] + g.half_width) / h - 0.5;
    if (!(xi >= 1.0 && xi < upper)) {
      throw OutOfDomainError("point outside the grid margin on axis " + std::to_string(a) +
                             " (coordinate " + std::to_string(x[a]) + ")");
    }
    const double fl = std::floor(xi);
    s.base[a] = static_cast<std::size_t>(fl);
    s.frac[a] = xi - fl;
  }
  return s;
}

template <bool WithValue, bool WithGradient>
double interpolate(const GridField& f, std::span<const double> x, std::span<double> grad) {
  const GridSpec& g = f.grid;
  const Stencil s = locate(g, x);
  const int d = g.dimension;
  const double inv_2h = 0.5 / g.spacing();
  std::array<std::size_t, kMaxDim> strides{};
  for (int a = 0; a < d; ++a) strides[a] = g.stride(a);

  double value = 0.0;
  std::array<double, kMaxDim> gsum{};
  for (unsigned corner = 0; corner < (1u << d); ++corner) {
    double w = 1.0;
    std::size_t idx = 0;
    for (int a = 0; a < d; ++a) {
      const bool up = (corner >> a) & 1u;
      w *= up ? s.frac[a] : 1.0 - s.frac[a];
      idx += (s.base[a] + (up ? 1 : 0)) * strides[a];
    }
    if constexpr (WithValue) value += w * f.values[idx];
    if constexpr (WithGradient) {
      for (int a = 0; a < d; ++a) {
        gsum[a] += w * (f.values[idx + strides[a]] - f.values[idx - strides[a]]) * inv_2h;
      }
    }
  }
  if constexpr (WithGradient) {
    for (int a = 0; a < d; ++a) grad[a] = gsum[a];
  }
  return value;
}

}  // namespace

double interpolate_field(const GridField& field, std::span<const double> x) {
  return interpolate<true, false>(field, x, {});
}

void interpolate_gradient(const GridField& field, std::span<const double> x,
                          std::span<double> out) {
  interpolate<false, true>(field, x, out);
}

double interpolate_value_and_gradient(const GridField& field, std::span<const double> x,
                                      std::span<double> gradient) {
  return interpolate<true, true>(field, x, gradient);
}

}  // namespace kslab
