#include "kslab/initial_datum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kslab/error.hpp"
#include "kslab/kernels.hpp"
#include "kslab/noise.hpp"

namespace kslab {
namespace {

constexpr std::size_t kMaxRejectionAttempts = 1000000;

// Average of the 1D standard-normal density with mean mu, sd s over [a, b].
double gaussian_cell_mass(double a, double b, double mu, double s) {
  const double za = (a - mu) / (s * std::numbers::sqrt2);
  const double zb = (b - mu) / (s * std::numbers::sqrt2);
  // erfc keeps precision in the far tails on either side.
  if (za >= 0.0) return 0.5 * (std::erfc(za) - std::erfc(zb));
  if (zb <= 0.0) return 0.5 * (std::erfc(-zb) - std::erfc(-za));
  return 1.0 - 0.5 * (std::erfc(-za) + std::erfc(zb));
}

}  // namespace

std::string to_string(InitialDatum::Kind kind) {
  switch (kind) {
    case InitialDatum::Kind::kGaussian:
      return "gaussian";
    case InitialDatum::Kind::kBump:
      return "bump";
    case InitialDatum::Kind::kUniformBox:
      return "uniform_box";
  }
  return "unknown";
}

InitialDatum::Kind initial_kind_from_string(const std::string& name) {
  if (name == "gaussian") return InitialDatum::Kind::kGaussian;
  if (name == "bump") return InitialDatum::Kind::kBump;
  if (name == "uniform_box") return InitialDatum::Kind::kUniformBox;
  throw ConfigError("unknown initial datum kind '" + name +
                    "' (expected gaussian, bump or uniform_box)");
}

void InitialDatum::validate(int dimension) const {
  if (!(scale > 0.0)) throw ConfigError("initial.scale must be positive");
  if (!center.empty() && center.size() != static_cast<std::size_t>(dimension)) {
    throw ConfigError("initial.center must have one entry per dimension");
  }
}

double InitialDatum::density(std::span<const double> x) const {
  const int d = static_cast<int>(x.size());
  double r2 = 0.0;
  double linf = 0.0;
  for (int a = 0; a < d; ++a) {
    const double dx = x[a] - center_coordinate(a);
    r2 += dx * dx;
    linf = std::max(linf, std::abs(dx));
  }
  switch (kind) {
    case Kind::kGaussian:
      return std::exp(-0.5 * r2 / (scale * scale)) /
             std::pow(2.0 * std::numbers::pi * scale * scale, 0.5 * d);
    case Kind::kBump:
      return shared_mollifier(d).radial(std::sqrt(r2), scale);
    case Kind::kUniformBox:
      return linf <= scale ? 1.0 / std::pow(2.0 * scale, d) : 0.0;
  }
  return 0.0;
}

ParticleEnsemble sample_initial(const InitialDatum& datum, int dimension, std::size_t count,
                                std::uint64_t seed, std::uint64_t replication) {
  datum.validate(dimension);
  ParticleEnsemble out(dimension, count);
  const NoiseStream stream(seed);
  const auto d = static_cast<std::size_t>(dimension);
  std::vector<double> draw(d + 1);

  if (datum.kind == InitialDatum::Kind::kGaussian) {
    for (std::size_t i = 0; i < count; ++i) {
      stream.normals(NoisePurpose::kInitialSample, replication, i, 0,
                     std::span<double>(draw.data(), d));
      auto x = out.position(i);
      for (std::size_t a = 0; a < d; ++a) {
        x[a] = datum.center_coordinate(static_cast<int>(a)) + datum.scale * draw[a];
      }
    }
    return out;
  }

  // Rejection from the bounding box center + [-scale, scale]^d.
  const double peak = bump_profile(0.0);
  std::size_t attempts = 0;
  std::size_t accepted = 0;
  for (std::size_t i = 0; i < count; ++i) {
    auto x = out.position(i);
    for (std::uint64_t k = 0;; ++k) {
      ++attempts;
      if (k >= kMaxRejectionAttempts ||
          (attempts >= 1000 && accepted * 1000 < attempts)) {
        throw ConfigError("initial datum rejection sampler acceptance rate below 1e-3");
      }
      stream.uniforms(NoisePurpose::kInitialSample, replication, i, k, draw);
      double r2 = 0.0;
      for (std::size_t a = 0; a < d; ++a) {
        const double offset = datum.scale * (2.0 * draw[a] - 1.0);
        x[a] = datum.center_coordinate(static_cast<int>(a)) + offset;
        r2 += offset * offset;
      }
      if (datum.kind == InitialDatum::Kind::kUniformBox) break;
      const double s = std::sqrt(r2) / datum.scale;
      if (draw[d] * peak < bump_profile(s)) break;
    }
    ++accepted;
  }
  return out;
}

GridField discretize(const InitialDatum& datum, const GridSpec& grid) {
  const int d = grid.dimension;
  datum.validate(d);
  GridField field(grid);
  const double h = grid.spacing();
  const std::size_t n = grid.resolution;

  std::vector<std::size_t> idx(static_cast<std::size_t>(d));
  switch (datum.kind) {
    case InitialDatum::Kind::kGaussian: {
      // Separable: per-axis interval masses.
      std::vector<std::vector<double>> axis(static_cast<std::size_t>(d), std::vector<double>(n));
      for (int a = 0; a < d; ++a) {
        for (std::size_t j = 0; j < n; ++j) {
          const double lo = grid.center(j) - 0.5 * h;
          axis[a][j] = gaussian_cell_mass(lo, lo + h, datum.center_coordinate(a), datum.scale) / h;
        }
      }
      for (std::size_t c = 0; c < field.values.size(); ++c) {
        grid.unravel(c, idx);
        double v = 1.0;
        for (int a = 0; a < d; ++a) v *= axis[a][idx[a]];
        field.values[c] = v;
      }
      break;
    }
    case InitialDatum::Kind::kUniformBox: {
      for (std::size_t c = 0; c < field.values.size(); ++c) {
        grid.unravel(c, idx);
        double v = 1.0;
        for (int a = 0; a < d; ++a) {
          const double lo = grid.center(idx[a]) - 0.5 * h;
          const double c0 = datum.center_coordinate(a);
          const double overlap =
              std::max(0.0, std::min(lo + h, c0 + datum.scale) - std::max(lo, c0 - datum.scale));
          v *= overlap / h / (2.0 * datum.scale);
        }
        field.values[c] = v;
      }
      break;
    }
    case InitialDatum::Kind::kBump: {
      constexpr int kSub = 8;
      const Mollifier& mollifier = shared_mollifier(d);
      for (std::size_t c = 0; c < field.values.size(); ++c) {
        grid.unravel(c, idx);
        // Skip cells whose nearest point is outside the support.
        double near2 = 0.0;
        for (int a = 0; a < d; ++a) {
          const double dx = std::max(0.0, std::abs(grid.center(idx[a]) - datum.center_coordinate(a)) - 0.5 * h);
          near2 += dx * dx;
        }
        if (near2 >= datum.scale * datum.scale) continue;
        double sum = 0.0;
        std::size_t total = 1;
        for (int a = 0; a < d; ++a) total *= kSub;
        for (std::size_t s = 0; s < total; ++s) {
          double r2 = 0.0;
          std::size_t rest = s;
          for (int a = 0; a < d; ++a) {
            const std::size_t k = rest % kSub;
            rest /= kSub;
            const double x = grid.center(idx[a]) - 0.5 * h + (static_cast<double>(k) + 0.5) * h / kSub;
            const double dx = x - datum.center_coordinate(a);
            r2 += dx * dx;
          }
          sum += mollifier.radial(std::sqrt(r2), datum.scale);
        }
        field.values[c] = sum / static_cast<double>(total);
      }
      break;
    }
  }

  const double mass = field.mass();
  if (!(mass > 0.0)) throw ConfigError("initial datum has no mass on the grid");
  for (double& v : field.values) v /= mass;
  return field;
}

}  // namespace kslab
