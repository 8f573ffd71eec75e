#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace kslab {

/// N particle positions in d dimensions at one time instant.
///
/// Each particle carries an identity key. Noise is drawn by key and inner
/// interaction sums run in ascending key order, so relabelling particles
/// permutes trajectories without changing a single bit. Default keys are 0..N-1.
class ParticleEnsemble {
 public:
  ParticleEnsemble() = default;
  ParticleEnsemble(int dimension, std::size_t count, double time = 0.0);
  ParticleEnsemble(int dimension, std::vector<double> positions, double time = 0.0);

  int dimension() const noexcept { return dim_; }
  std::size_t size() const noexcept { return ids_.size(); }
  double time() const noexcept { return time_; }
  void set_time(double t) noexcept { time_ = t; }

  std::span<double> position(std::size_t i) noexcept {
    return {pos_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  std::span<const double> position(std::size_t i) const noexcept {
    return {pos_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  std::span<double> positions() noexcept { return pos_; }
  std::span<const double> positions() const noexcept { return pos_; }

  std::span<const std::uint64_t> ids() const noexcept { return ids_; }
  /// Replaces identity keys; they must be distinct. Throws InvalidArgument.
  void set_ids(std::vector<std::uint64_t> ids);

  /// Particle indices sorted by ascending identity key.
  std::vector<std::size_t> key_order() const;

  bool operator==(const ParticleEnsemble&) const = default;

 private:
  int dim_ = 0;
  double time_ = 0.0;
  std::vector<double> pos_;
  std::vector<std::uint64_t> ids_;
};

}  // namespace kslab
