#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace kslab {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
/// Stateless: the output block is a pure function of (counter, key).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter ctr, Key key) noexcept;
};

/// Which consumer a draw belongs to. Different purposes never share counters.
enum class NoisePurpose : std::uint32_t {
  kIncrement = 0,
  kInitialSample = 1,
  kResample = 2,
  kDirections = 3,
};

/// Reproducible Brownian-increment source keyed by (seed, replication, particle, step).
///
/// Every draw is a pure function of its key, so the sequence replays identically
/// whatever order particles are visited in and however many threads do the visiting.
class NoiseStream {
 public:
  explicit NoiseStream(std::uint64_t seed) noexcept : seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  /// Fills `out` with independent standard normals for the given key.
  void normals(NoisePurpose purpose, std::uint64_t replication, std::uint64_t particle,
               std::uint64_t step, std::span<double> out) const noexcept;

  /// Fills `out` with independent uniforms on the open interval (0, 1).
  void uniforms(NoisePurpose purpose, std::uint64_t replication, std::uint64_t particle,
                std::uint64_t step, std::span<double> out) const noexcept;

  /// Brownian increment sqrt(dt) * xi for one particle and step.
  void increment(std::uint64_t replication, std::uint64_t particle, std::uint64_t step,
                 double dt, std::span<double> out) const noexcept;

 private:
  std::uint64_t seed_;
};

}  // namespace kslab
