#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kslab/ensemble.hpp"
#include "kslab/grid.hpp"

namespace kslab {

/// Unit-mass initial density u_0.
///  - gaussian: mean `center`, covariance scale^2 * I
///  - bump: V^{scale}(x - center), the mollifier profile of radius `scale`
///  - uniform_box: uniform on center + [-scale, scale]^d
struct InitialDatum {
  enum class Kind { kGaussian, kBump, kUniformBox };

  Kind kind = Kind::kGaussian;
  std::vector<double> center;  // empty means the origin
  double scale = 0.5;

  /// Throws ConfigError on invalid parameters for dimension d.
  void validate(int dimension) const;
  double density(std::span<const double> x) const;
  double center_coordinate(int axis) const noexcept {
    return center.empty() ? 0.0 : center[static_cast<std::size_t>(axis)];
  }
};

std::string to_string(InitialDatum::Kind kind);
InitialDatum::Kind initial_kind_from_string(const std::string& name);

/// N i.i.d. samples from the datum, a pure function of (seed, replication).
/// Throws ConfigError if rejection sampling accepts fewer than 1 in 1000 proposals.
ParticleEnsemble sample_initial(const InitialDatum& datum, int dimension, std::size_t count,
                                std::uint64_t seed, std::uint64_t replication = 0);

/// Cell averages of the datum on the grid, renormalized to unit discrete mass.
GridField discretize(const InitialDatum& datum, const GridSpec& grid);

}  // namespace kslab
