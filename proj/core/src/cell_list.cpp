#include "cell_list.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kslab/error.hpp"

namespace kslab::detail {

CellList::CellList(int dimension, double width) : dim_(dimension), width_(width) {
  if (dimension != 2 && dimension != 3) throw InvalidArgument("cell list supports d = 2, 3");
  if (!(width > 0.0)) throw ConfigError("cell width must be positive");
}

void CellList::build(std::span<const double> points, std::size_t n) {
  std::array<double, 3> hi{};
  for (int a = 0; a < dim_; ++a) {
    lo_[a] = std::numeric_limits<double>::infinity();
    hi[a] = -std::numeric_limits<double>::infinity();
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (int a = 0; a < dim_; ++a) {
      lo_[a] = std::min(lo_[a], points[k * dim_ + a]);
      hi[a] = std::max(hi[a], points[k * dim_ + a]);
    }
  }
  if (n == 0) {
    for (int a = 0; a < dim_; ++a) lo_[a] = hi[a] = 0.0;
  }

  double width = width_;
  const double budget = 8.0 * static_cast<double>(n) + 64.0;
  for (;;) {
    double cells = 1.0;
    for (int a = 0; a < dim_; ++a) cells *= std::floor((hi[a] - lo_[a]) / width) + 1.0;
    if (cells <= budget) break;
    width *= 1.25;
  }
  inv_width_ = 1.0 / width;
  std::size_t total = 1;
  for (int a = 0; a < dim_; ++a) {
    counts_[a] = static_cast<long>(std::floor((hi[a] - lo_[a]) * inv_width_)) + 1;
    total *= static_cast<std::size_t>(counts_[a]);
  }

  // Counting sort keeps members of a cell in ascending point order.
  std::vector<std::size_t> cell_of(n);
  start_.assign(total + 1, 0);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t cell = 0;
    for (int a = 0; a < dim_; ++a) {
      cell = cell * static_cast<std::size_t>(counts_[a]) +
             static_cast<std::size_t>(cell_coord(points[k * dim_ + a], a));
    }
    cell_of[k] = cell;
    ++start_[cell + 1];
  }
  for (std::size_t c = 0; c < total; ++c) start_[c + 1] += start_[c];
  members_.assign(n, 0);
  std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
  for (std::size_t k = 0; k < n; ++k) members_[fill[cell_of[k]]++] = k;
}

}  // namespace kslab::detail
