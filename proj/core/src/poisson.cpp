#include "kslab/poisson.hpp"

#include <fftw3.h>

#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <mutex>
#include <numbers>

#include "kslab/error.hpp"
#include "kslab/kernels.hpp"

namespace kslab {

namespace {

// FFTW planning is not thread-safe; execution with new arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};

template <class T>
std::unique_ptr<T[], FftwFree> fftw_buffer(std::size_t count) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * count));
  if (p == nullptr) throw std::bad_alloc();
  return std::unique_ptr<T[], FftwFree>(p);
}

}  // namespace

struct FreeSpaceConvolver::Impl {
  GridSpec grid;
  int d = 2;
  std::size_t n = 0;
  std::size_t padded = 0;    // 2n
  std::size_t real_size = 0;  // (2n)^d
  std::size_t complex_size = 0;
  fftw_plan forward_plan = nullptr;
  fftw_plan inverse_plan = nullptr;

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (forward_plan != nullptr) fftw_destroy_plan(forward_plan);
    if (inverse_plan != nullptr) fftw_destroy_plan(inverse_plan);
  }
};

FreeSpaceConvolver::FreeSpaceConvolver(const GridSpec& grid) : impl_(std::make_unique<Impl>()) {
  if (grid.dimension < 1 || grid.dimension > 3) {
    throw ConfigError("free-space convolution supports dimension 1..3");
  }
  if (grid.resolution < 2 || grid.resolution % 2 != 0) {
    throw ConfigError("grid resolution must be even for domain doubling");
  }
  if (!(grid.half_width > 0.0)) throw ConfigError("grid half-width must be positive");
  Impl& s = *impl_;
  s.grid = grid;
  s.d = grid.dimension;
  s.n = grid.resolution;
  s.padded = 2 * s.n;
  s.real_size = 1;
  for (int a = 0; a < s.d; ++a) s.real_size *= s.padded;
  s.complex_size = s.real_size / s.padded * (s.padded / 2 + 1);

  std::array<int, 3> dims{};
  for (int a = 0; a < s.d; ++a) dims[a] = static_cast<int>(s.padded);
  auto in = fftw_buffer<double>(s.real_size);
  auto out = fftw_buffer<fftw_complex>(s.complex_size);
  std::lock_guard lock(planner_mutex());
  s.forward_plan = fftw_plan_dft_r2c(s.d, dims.data(), in.get(), out.get(), FFTW_ESTIMATE);
  s.inverse_plan = fftw_plan_dft_c2r(s.d, dims.data(), out.get(), in.get(), FFTW_ESTIMATE);
  if (s.forward_plan == nullptr || s.inverse_plan == nullptr) {
    throw Error("FFTW planning failed");
  }
}

FreeSpaceConvolver::~FreeSpaceConvolver() = default;
FreeSpaceConvolver::FreeSpaceConvolver(FreeSpaceConvolver&&) noexcept = default;
FreeSpaceConvolver& FreeSpaceConvolver::operator=(FreeSpaceConvolver&&) noexcept = default;

const GridSpec& FreeSpaceConvolver::grid() const noexcept { return impl_->grid; }

FreeSpaceConvolver::Spectrum FreeSpaceConvolver::kernel_spectrum(const KernelFn& kernel,
                                                                bool unit_mass) const {
  const Impl& s = *impl_;
  const double h = s.grid.spacing();
  auto in = fftw_buffer<double>(s.real_size);
  std::array<double, 3> offset{};
  std::array<std::size_t, 3> idx{};
  double total = 0.0;
  for (std::size_t flat = 0; flat < s.real_size; ++flat) {
    std::size_t rest = flat;
    for (int a = s.d - 1; a >= 0; --a) {
      idx[a] = rest % s.padded;
      rest /= s.padded;
    }
    bool origin = true;
    for (int a = 0; a < s.d; ++a) {
      const long k = idx[a] < s.n ? static_cast<long>(idx[a])
                                  : static_cast<long>(idx[a]) - static_cast<long>(s.padded);
      offset[a] = static_cast<double>(k) * h;
      origin = origin && k == 0;
    }
    in[flat] = kernel(std::span<const double>(offset.data(), static_cast<std::size_t>(s.d)),
                      origin);
    total += in[flat];
  }
  double weight = s.grid.cell_volume();
  if (unit_mass) {
    if (!(total > 0.0)) throw InvalidArgument("kernel has no positive mass on this grid");
    weight = 1.0 / total;
  }
  // Fold the quadrature weight and the FFT normalization into the kernel.
  weight /= static_cast<double>(s.real_size);
  for (std::size_t k = 0; k < s.real_size; ++k) in[k] *= weight;

  auto out = fftw_buffer<fftw_complex>(s.complex_size);
  fftw_execute_dft_r2c(s.forward_plan, in.get(), out.get());
  Spectrum spec(s.complex_size);
  for (std::size_t k = 0; k < s.complex_size; ++k) spec[k] = {out[k][0], out[k][1]};
  return spec;
}

FreeSpaceConvolver::Spectrum FreeSpaceConvolver::forward(std::span<const double> values) const {
  const Impl& s = *impl_;
  if (values.size() != s.grid.cells()) throw InvalidArgument("field size does not match grid");
  auto in = fftw_buffer<double>(s.real_size);
  std::fill(in.get(), in.get() + s.real_size, 0.0);
  std::array<std::size_t, 3> idx{};
  for (std::size_t flat = 0; flat < values.size(); ++flat) {
    s.grid.unravel(flat, std::span<std::size_t>(idx.data(), static_cast<std::size_t>(s.d)));
    std::size_t p = 0;
    for (int a = 0; a < s.d; ++a) p = p * s.padded + idx[a];
    in[p] = values[flat];
  }
  auto out = fftw_buffer<fftw_complex>(s.complex_size);
  fftw_execute_dft_r2c(s.forward_plan, in.get(), out.get());
  Spectrum spec(s.complex_size);
  for (std::size_t k = 0; k < s.complex_size; ++k) spec[k] = {out[k][0], out[k][1]};
  return spec;
}

std::vector<double> FreeSpaceConvolver::inverse(const Spectrum& field,
                                                const Spectrum& kernel) const {
  const Impl& s = *impl_;
  if (field.size() != s.complex_size || kernel.size() != s.complex_size) {
    throw InvalidArgument("spectrum size does not match grid");
  }
  auto in = fftw_buffer<fftw_complex>(s.complex_size);
  for (std::size_t k = 0; k < s.complex_size; ++k) {
    const std::complex<double> v = field[k] * kernel[k];
    in[k][0] = v.real();
    in[k][1] = v.imag();
  }
  auto out = fftw_buffer<double>(s.real_size);
  fftw_execute_dft_c2r(s.inverse_plan, in.get(), out.get());
  std::vector<double> result(s.grid.cells());
  std::array<std::size_t, 3> idx{};
  for (std::size_t flat = 0; flat < result.size(); ++flat) {
    s.grid.unravel(flat, std::span<std::size_t>(idx.data(), static_cast<std::size_t>(s.d)));
    std::size_t p = 0;
    for (int a = 0; a < s.d; ++a) p = p * s.padded + idx[a];
    result[flat] = out[p];
  }
  return result;
}

std::vector<double> FreeSpaceConvolver::convolve(std::span<const double> values,
                                                 const Spectrum& kernel) const {
  return inverse(forward(values), kernel);
}

double green_origin_average(int dimension, double h) {
  if (dimension != 2 && dimension != 3) {
    throw InvalidArgument("Green's function cell average supports d = 2, 3");
  }
  if (!(h > 0.0)) throw InvalidArgument("cell width must be positive");
  using Rule = boost::math::quadrature::gauss<double, 20>;
  const double a = 0.5 * h;
  // The cell splits into 2d pyramids with apex at the origin and a face at
  // distance a. Along each ray the radial integral is done in closed form.
  if (dimension == 2) {
    const double line = Rule::integrate(
        [a](double y) {
          const double r0 = std::sqrt(a * a + y * y);
          return -(0.5 * std::log(r0) - 0.25) / (2.0 * std::numbers::pi);
        },
        -a, a);
    return 4.0 * a * line / (h * h);
  }
  const double c3 = 1.0 / (4.0 * std::numbers::pi);
  const double face = Rule::integrate(
      [a, c3](double y1) {
        return Rule::integrate(
            [a, c3, y1](double y2) { return c3 / (2.0 * std::sqrt(a * a + y1 * y1 + y2 * y2)); },
            -a, a);
      },
      -a, a);
  return 6.0 * a * face / (h * h * h);
}

double mollified_potential_radial(int dimension, double eps, double r) {
  const CoulombKernel base(dimension);
  if (r >= eps) return base.phi_radial(r);
  const Mollifier& v = shared_mollifier(dimension);
  const double area = unit_sphere_area(dimension);
  // Phi^eps(r) = Phi(eps) + int_r^eps M(s) / (|S| s^{d-1}) ds; the integrand
  // is M(s)/s^{d-1} = s q(s/eps) / eps^d, smooth down to s = 0.
  using Rule = boost::math::quadrature::gauss<double, 20>;
  const double tail = Rule::integrate(
      [&](double s) {
        return s * v.mass_ratio(s / eps) / (std::pow(eps, dimension) * area);
      },
      r, eps);
  return base.phi_radial(eps) + tail;
}

PoissonSolution poisson_free_space(const GridField& source) {
  const GridSpec& g = source.grid;
  if (g.dimension != 2 && g.dimension != 3) {
    throw ConfigError("Poisson solver supports dimension 2 or 3");
  }
  if (source.values.size() != g.cells()) throw InvalidArgument("field size does not match grid");
  const FreeSpaceConvolver conv(g);
  const CoulombKernel phi(g.dimension);
  const double origin = green_origin_average(g.dimension, g.spacing());
  const auto spec = conv.forward(source.values);

  PoissonSolution sol;
  const auto green = conv.kernel_spectrum([&](std::span<const double> x, bool at_origin) {
    return at_origin ? origin : phi.phi(x);
  });
  sol.potential = GridField(g, source.time);
  sol.potential.values = conv.inverse(spec, green);
  for (int a = 0; a < g.dimension; ++a) {
    const auto kernel = conv.kernel_spectrum([&](std::span<const double> x, bool at_origin) {
      if (at_origin) return 0.0;
      double r2 = 0.0;
      for (double v : x) r2 += v * v;
      return phi.gradient_factor(r2) * x[static_cast<std::size_t>(a)];
    });
    GridField comp(g, source.time);
    comp.values = conv.inverse(spec, kernel);
    sol.gradient.push_back(std::move(comp));
  }
  return sol;
}

}  // namespace kslab
