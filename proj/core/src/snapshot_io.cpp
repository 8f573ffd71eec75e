#include "kslab/snapshot_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "kslab/error.hpp"

namespace kslab {

namespace {

template <class T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
  }
  return v;
}

template <class T>
void put(std::ostream& out, T v) {
  v = to_little(v);
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  T v;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) throw IoError("truncated snapshot");
  return to_little(v);
}

void put_doubles(std::ostream& out, std::span<const double> values) {
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size() * sizeof(double)));
  } else {
    for (double v : values) put(out, v);
  }
}

void get_doubles(std::istream& in, std::span<double> values) {
  if constexpr (std::endian::native == std::endian::little) {
    if (!in.read(reinterpret_cast<char*>(values.data()),
                 static_cast<std::streamsize>(values.size() * sizeof(double)))) {
      throw IoError("truncated snapshot payload");
    }
  } else {
    for (double& v : values) v = get<double>(in);
  }
}

void expect_magic(std::istream& in, const char* magic) {
  char m[4];
  if (!in.read(m, 4)) throw IoError("truncated snapshot header");
  if (std::memcmp(m, magic, 4) != 0) {
    throw IoError(std::string("bad magic, expected ") + magic);
  }
  const auto version = get<std::uint32_t>(in);
  if (version != kSnapshotVersion) {
    throw IoError("unsupported snapshot version " + std::to_string(version));
  }
}

template <class Fn>
void with_output(const std::filesystem::path& path, Fn fn) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  fn(out);
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

template <class Fn>
auto with_input(const std::filesystem::path& path, Fn fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return fn(in);
}

}  // namespace

void write_snapshot(std::ostream& out, const ParticleEnsemble& ensemble) {
  out.write("KSPC", 4);
  put<std::uint32_t>(out, kSnapshotVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(ensemble.dimension()));
  put<std::uint64_t>(out, ensemble.size());
  put<double>(out, ensemble.time());
  put_doubles(out, ensemble.positions());
  if (!out) throw IoError("snapshot write failed");
}

ParticleEnsemble read_snapshot(std::istream& in) {
  expect_magic(in, "KSPC");
  const auto d = get<std::uint32_t>(in);
  const auto n = get<std::uint64_t>(in);
  const auto t = get<double>(in);
  if (d > 64) throw IoError("implausible snapshot dimension");
  if (d == 0 && n != 0) throw IoError("zero-dimensional snapshot with particles");
  std::vector<double> pos(static_cast<std::size_t>(n) * d);
  get_doubles(in, pos);
  return ParticleEnsemble(static_cast<int>(d), std::move(pos), t);
}

void write_snapshot(const std::filesystem::path& path, const ParticleEnsemble& ensemble) {
  with_output(path, [&](std::ostream& out) { write_snapshot(out, ensemble); });
}

ParticleEnsemble read_snapshot(const std::filesystem::path& path) {
  return with_input(path, [](std::istream& in) { return read_snapshot(in); });
}

void write_field(std::ostream& out, const GridField& field) {
  if (field.values.size() != field.grid.cells()) throw InvalidArgument("field size does not match grid");
  out.write("KSFD", 4);
  put<std::uint32_t>(out, kSnapshotVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(field.grid.dimension));
  put<std::uint64_t>(out, field.grid.resolution);
  put<double>(out, field.grid.half_width);
  put<double>(out, field.time);
  put_doubles(out, field.values);
  if (!out) throw IoError("field write failed");
}

GridField read_field(std::istream& in) {
  expect_magic(in, "KSFD");
  GridSpec g;
  g.dimension = static_cast<int>(get<std::uint32_t>(in));
  g.resolution = static_cast<std::size_t>(get<std::uint64_t>(in));
  g.half_width = get<double>(in);
  const double t = get<double>(in);
  if (g.dimension < 1 || g.dimension > 3 || g.resolution == 0 || g.resolution > (1u << 16)) {
    throw IoError("implausible field header");
  }
  GridField f(g, t);
  get_doubles(in, f.values);
  return f;
}

void write_field(const std::filesystem::path& path, const GridField& field) {
  with_output(path, [&](std::ostream& out) { write_field(out, field); });
}

GridField read_field(const std::filesystem::path& path) {
  return with_input(path, [](std::istream& in) { return read_field(in); });
}

}  // namespace kslab
