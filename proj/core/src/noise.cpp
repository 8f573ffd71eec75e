#include "kslab/noise.hpp"

#include <cmath>
#include <numbers>

namespace kslab {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) noexcept {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

// 53-bit uniform strictly inside (0, 1).
inline double to_open_unit(std::uint32_t hi, std::uint32_t lo) noexcept {
  const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

// The replication and step words are 64-bit at the interface; the low 32 bits of
// each go into the counter and the high bits are folded into the block word.
Philox4x32::Counter make_counter(NoisePurpose purpose, std::uint64_t replication,
                                 std::uint64_t particle, std::uint64_t step,
                                 std::uint32_t block) noexcept {
  const auto high = static_cast<std::uint32_t>((replication >> 32) ^ (step >> 32) ^
                                               (particle >> 32));
  return {static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(particle),
          static_cast<std::uint32_t>(replication),
          (static_cast<std::uint32_t>(purpose) << 28) ^ (high << 12) ^ block};
}

Philox4x32::Key make_key(std::uint64_t seed) noexcept {
  return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

}  // namespace

Philox4x32::Counter Philox4x32::generate(Counter ctr, Key key) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

void NoiseStream::uniforms(NoisePurpose purpose, std::uint64_t replication,
                           std::uint64_t particle, std::uint64_t step,
                           std::span<double> out) const noexcept {
  const auto key = make_key(seed_);
  std::uint32_t block = 0;
  for (std::size_t k = 0; k < out.size(); k += 2, ++block) {
    const auto r = Philox4x32::generate(
        make_counter(purpose, replication, particle, step, block), key);
    out[k] = to_open_unit(r[0], r[1]);
    if (k + 1 < out.size()) out[k + 1] = to_open_unit(r[2], r[3]);
  }
}

void NoiseStream::normals(NoisePurpose purpose, std::uint64_t replication,
                          std::uint64_t particle, std::uint64_t step,
                          std::span<double> out) const noexcept {
  const auto key = make_key(seed_);
  std::uint32_t block = 0;
  for (std::size_t k = 0; k < out.size(); k += 2, ++block) {
    const auto r = Philox4x32::generate(
        make_counter(purpose, replication, particle, step, block), key);
    const double u1 = to_open_unit(r[0], r[1]);
    const double u2 = to_open_unit(r[2], r[3]);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    out[k] = radius * std::cos(angle);
    if (k + 1 < out.size()) out[k + 1] = radius * std::sin(angle);
  }
}

void NoiseStream::increment(std::uint64_t replication, std::uint64_t particle,
                            std::uint64_t step, double dt,
                            std::span<double> out) const noexcept {
  normals(NoisePurpose::kIncrement, replication, particle, step, out);
  const double scale = std::sqrt(dt);
  for (double& v : out) v *= scale;
}

}  // namespace kslab
