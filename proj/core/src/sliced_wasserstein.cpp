#include "kslab/sliced_wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "kslab/error.hpp"
#include "kslab/noise.hpp"

namespace kslab {

std::vector<double> projection_directions(int dimension, std::size_t count, std::uint64_t seed) {
  if (dimension < 1) throw InvalidArgument("dimension must be positive");
  if (count == 0) throw InvalidArgument("need at least one direction");
  const NoiseStream noise(seed);
  const std::size_t d = static_cast<std::size_t>(dimension);
  std::vector<double> dirs(count * d);
  if (dimension == 1) {
    std::fill(dirs.begin(), dirs.end(), 1.0);
    return dirs;
  }
  if (dimension == 2) {
    double u0;
    noise.uniforms(NoisePurpose::kDirections, 0, 0, 0, std::span<double>(&u0, 1));
    for (std::size_t j = 0; j < count; ++j) {
      const double angle = std::numbers::pi * (static_cast<double>(j) + u0) / static_cast<double>(count);
      dirs[2 * j] = std::cos(angle);
      dirs[2 * j + 1] = std::sin(angle);
    }
    return dirs;
  }
  for (std::size_t j = 0; j < count; ++j) {
    std::span<double> v(dirs.data() + j * d, d);
    double norm = 0.0;
    for (std::uint64_t attempt = 0; norm < 1e-12; ++attempt) {
      noise.normals(NoisePurpose::kDirections, attempt, j, 1, v);
      norm = 0.0;
      for (double c : v) norm += c * c;
    }
    norm = std::sqrt(norm);
    for (double& c : v) c /= norm;
  }
  return dirs;
}

double wasserstein1_1d(std::span<const double> x, std::span<const double> wx,
                       std::span<const double> y, std::span<const double> wy) {
  if (x.size() != wx.size() || y.size() != wy.size()) {
    throw InvalidArgument("points and weights differ in length");
  }
  if (x.empty() || y.empty()) throw InvalidArgument("W1 needs nonempty point sets");
  auto sorted = [](std::span<const double> p, std::span<const double> w) {
    std::vector<std::size_t> idx(p.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
    double total = 0.0;
    for (double v : w) {
      if (v < 0.0) throw InvalidArgument("weights must be nonnegative");
      total += v;
    }
    if (!(total > 0.0)) throw InvalidArgument("weights must have positive total");
    std::vector<std::pair<double, double>> out;
    out.reserve(p.size());
    for (std::size_t k : idx) out.emplace_back(p[k], w[k] / total);
    return out;
  };
  const auto a = sorted(x, wx);
  const auto b = sorted(y, wy);
  // Integrate |F_a - F_b| between consecutive breakpoints of the merged support.
  std::size_t i = 0;
  std::size_t j = 0;
  double fa = 0.0;
  double fb = 0.0;
  double last = std::min(a[0].first, b[0].first);
  double result = 0.0;
  while (i < a.size() || j < b.size()) {
    const double next = (j >= b.size() || (i < a.size() && a[i].first <= b[j].first))
                            ? a[i].first
                            : b[j].first;
    result += std::abs(fa - fb) * (next - last);
    last = next;
    while (i < a.size() && a[i].first == next) fa += a[i++].second;
    while (j < b.size() && b[j].first == next) fb += b[j++].second;
  }
  return result;
}

WeightedPoints field_points(const GridField& field, std::size_t sub) {
  const GridSpec& g = field.grid;
  if (sub == 0) throw InvalidArgument("sub-sampling must be positive");
  const int d = g.dimension;
  const double h = g.spacing();
  std::size_t per_cell = 1;
  for (int a = 0; a < d; ++a) per_cell *= sub;
  WeightedPoints wp;
  wp.dimension = d;
  std::vector<std::size_t> idx(static_cast<std::size_t>(d));
  std::vector<std::size_t> sidx(static_cast<std::size_t>(d));
  for (std::size_t k = 0; k < g.cells(); ++k) {
    const double v = field.values[k];
    if (v < 0.0) throw InvalidArgument("reference field must be nonnegative");
    if (v == 0.0) continue;
    g.unravel(k, idx);
    const double w = v * g.cell_volume() / static_cast<double>(per_cell);
    for (std::size_t s = 0; s < per_cell; ++s) {
      std::size_t rest = s;
      for (int a = d - 1; a >= 0; --a) {
        sidx[a] = rest % sub;
        rest /= sub;
      }
      for (int a = 0; a < d; ++a) {
        const double offset = (static_cast<double>(sidx[a]) + 0.5) / static_cast<double>(sub) - 0.5;
        wp.points.push_back(g.center(idx[a]) + offset * h);
      }
      wp.weights.push_back(w);
    }
  }
  return wp;
}

double sliced_w1(std::span<const double> samples, const WeightedPoints& reference,
                 std::span<const double> directions) {
  const std::size_t d = static_cast<std::size_t>(reference.dimension);
  if (d == 0 || samples.size() % d != 0 || directions.size() % d != 0) {
    throw InvalidArgument("sample or direction shape does not match the reference dimension");
  }
  const std::size_t n = samples.size() / d;
  const std::size_t m = reference.weights.size();
  const std::size_t count = directions.size() / d;
  std::vector<double> ps(n);
  std::vector<double> ws(n, 1.0);
  std::vector<double> pr(m);
  double total = 0.0;
  for (std::size_t j = 0; j < count; ++j) {
    const double* dir = directions.data() + j * d;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t a = 0; a < d; ++a) s += dir[a] * samples[i * d + a];
      ps[i] = s;
    }
    for (std::size_t i = 0; i < m; ++i) {
      double s = 0.0;
      for (std::size_t a = 0; a < d; ++a) s += dir[a] * reference.points[i * d + a];
      pr[i] = s;
    }
    total += wasserstein1_1d(ps, ws, pr, reference.weights);
  }
  return total / static_cast<double>(count);
}

std::vector<double> sample_field(const GridField& field, std::size_t count, std::uint64_t seed,
                                 std::uint64_t stream) {
  const GridSpec& g = field.grid;
  const std::size_t d = static_cast<std::size_t>(g.dimension);
  std::vector<double> cdf(field.values.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < cdf.size(); ++k) {
    if (field.values[k] < 0.0) throw InvalidArgument("field must be nonnegative");
    acc += field.values[k];
    cdf[k] = acc;
  }
  if (!(acc > 0.0)) throw InvalidArgument("field has no mass");
  const NoiseStream noise(seed);
  std::vector<double> out(count * d);
  std::vector<double> u(d + 1);
  std::vector<std::size_t> idx(d);
  const double h = g.spacing();
  for (std::size_t i = 0; i < count; ++i) {
    noise.uniforms(NoisePurpose::kResample, stream, i, 0, u);
    const double target = u[0] * acc;
    std::size_t k = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), target) - cdf.begin());
    if (k >= cdf.size()) k = cdf.size() - 1;
    g.unravel(k, idx);
    for (std::size_t a = 0; a < d; ++a) out[i * d + a] = g.center(idx[a]) + (u[a + 1] - 0.5) * h;
  }
  return out;
}

}  // namespace kslab
