#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace kslab::detail {

/// Uniform binning of points for neighbor queries within one cell width.
/// Members of each cell are stored in ascending input order.
class CellList {
 public:
  CellList(int dimension, double width);

  /// Bins n row-major points. Widens cells if the box would need more than
  /// ~8n cells, which keeps every query complete.
  void build(std::span<const double> points, std::size_t n);

  double width() const noexcept { return width_; }

  /// Calls f(k) for every point index k in the 3^d cells around x.
  template <class F>
  void for_each_candidate(const double* x, F&& f) const {
    std::array<long, 3> home{};
    for (int a = 0; a < dim_; ++a) home[a] = cell_coord(x[a], a);
    const int total = dim_ == 2 ? 9 : 27;
    for (int o = 0; o < total; ++o) {
      int rest = o;
      std::size_t cell = 0;
      bool inside = true;
      for (int a = 0; a < dim_; ++a) {
        const long c = home[a] + (rest % 3) - 1;
        rest /= 3;
        if (c < 0 || c >= counts_[a]) {
          inside = false;
          break;
        }
        cell = cell * static_cast<std::size_t>(counts_[a]) + static_cast<std::size_t>(c);
      }
      if (!inside) continue;
      for (std::size_t p = start_[cell]; p < start_[cell + 1]; ++p) f(members_[p]);
    }
  }

 private:
  long cell_coord(double x, int axis) const noexcept {
    long c = static_cast<long>((x - lo_[axis]) * inv_width_);
    if (c < 0) c = 0;
    if (c >= counts_[axis]) c = counts_[axis] - 1;
    return c;
  }

  int dim_;
  double width_;
  double inv_width_ = 0.0;
  std::array<double, 3> lo_{};
  std::array<long, 3> counts_{};
  std::vector<std::size_t> start_;
  std::vector<std::size_t> members_;
};

}  // namespace kslab::detail
