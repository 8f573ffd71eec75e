#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "kslab/grid.hpp"

namespace kslab {

/// Unit projection directions, row-major (count x d). For d = 2 the angles are
/// pi (j + u0) / count with a seeded offset u0; otherwise normalized Gaussians.
std::vector<double> projection_directions(int dimension, std::size_t count, std::uint64_t seed);

/// W1 between two weighted point sets on the line. Weights are normalized internally.
double wasserstein1_1d(std::span<const double> x, std::span<const double> wx,
                       std::span<const double> y, std::span<const double> wy);

/// Field discretized as weighted points: `sub`^d points per cell, each
/// carrying 1/sub^d of the cell mass.
struct WeightedPoints {
  int dimension = 0;
  std::vector<double> points;  // row-major
  std::vector<double> weights;
};
WeightedPoints field_points(const GridField& field, std::size_t sub = 4);

/// Mean over directions of W1 between the projected samples (equal weights)
/// and the projected reference.
double sliced_w1(std::span<const double> samples, const WeightedPoints& reference,
                 std::span<const double> directions);

/// `count` i.i.d. draws from a nonnegative grid field: cell by mass, then uniform in the cell.
std::vector<double> sample_field(const GridField& field, std::size_t count, std::uint64_t seed,
                                 std::uint64_t stream = 0);

}  // namespace kslab
