#pragma once

#include <filesystem>
#include <iosfwd>

#include "kslab/ensemble.hpp"
#include "kslab/grid.hpp"

namespace kslab {

inline constexpr std::uint32_t kSnapshotVersion = 1;

/// Particle snapshot: "KSPC", u32 version, u32 d, u64 N, f64 t, then N*d
/// little-endian doubles, row-major. Identity keys are not stored.
void write_snapshot(std::ostream& out, const ParticleEnsemble& ensemble);
ParticleEnsemble read_snapshot(std::istream& in);
void write_snapshot(const std::filesystem::path& path, const ParticleEnsemble& ensemble);
ParticleEnsemble read_snapshot(const std::filesystem::path& path);

/// Field snapshot: "KSFD", u32 version, u32 d, u64 n, f64 L, f64 t, then n^d
/// little-endian doubles in grid order.
void write_field(std::ostream& out, const GridField& field);
GridField read_field(std::istream& in);
void write_field(const std::filesystem::path& path, const GridField& field);
GridField read_field(const std::filesystem::path& path);

}  // namespace kslab
