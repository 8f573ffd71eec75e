#include "kslab/mean_field_pde.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "kslab/error.hpp"
#include "kslab/kernels.hpp"
#include "kslab/nonlinearity.hpp"

namespace kslab {

struct MeanFieldOperator::Impl {
  std::optional<FreeSpaceConvolver> conv;
  FreeSpaceConvolver::Spectrum chemical_kernel;
  std::vector<FreeSpaceConvolver::Spectrum> gradient_kernels;
  FreeSpaceConvolver::Spectrum density_kernel;
  std::optional<CutoffPressure> cutoff;
};

namespace {

void check_params(const PdeParams& p) {
  std::vector<std::string> v;
  const int d = p.grid.dimension;
  if (d != 2 && d != 3) v.push_back("PDE dimension must be 2 or 3");
  if (!(p.m == 2.0 || p.m >= 3.0)) v.push_back("m must be 2 or >= 3");
  if (!(p.sigma >= 0.0)) v.push_back("sigma must be >= 0");
  if (p.grid.resolution < 4 || p.grid.resolution % 2 != 0) {
    v.push_back("grid resolution must be even and >= 4");
  }
  if (!(p.grid.half_width > 0.0)) v.push_back("grid half-width must be positive");
  if (p.mode == PdeMode::kMollified) {
    if (!(p.kernel.eps_k > 0.0) || !(p.kernel.eps_p > 0.0)) v.push_back("eps must be positive");
  }
  if (v.empty()) return;
  std::string msg = "invalid PDE parameters:";
  for (const auto& s : v) msg += "\n  " + s;
  throw ConfigError(msg);
}

double minmod(double a, double b) noexcept {
  if (a * b <= 0.0) return 0.0;
  return std::abs(a) < std::abs(b) ? a : b;
}

}  // namespace

MeanFieldOperator::MeanFieldOperator(const PdeParams& params)
    : params_(params), impl_(std::make_unique<Impl>()) {
  check_params(params_);
  const GridSpec& g = params_.grid;
  const int d = g.dimension;
  const bool mollified = params_.mode == PdeMode::kMollified;
  if (mollified && params_.drifts.repulsion) impl_->cutoff.emplace(params_.m, params_.kernel.lambda);

  const bool need_chem = params_.drifts.aggregation;
  const bool need_density = mollified && params_.drifts.repulsion;
  if (!need_chem && !need_density) return;
  impl_->conv.emplace(g);
  const FreeSpaceConvolver& conv = *impl_->conv;
  const CoulombKernel phi(d);

  if (need_chem) {
    if (mollified) {
      const double eps = params_.kernel.eps_k;
      const MollifiedCoulomb grad_phi(d, eps);
      impl_->chemical_kernel = conv.kernel_spectrum([&](std::span<const double> x, bool) {
        double r2 = 0.0;
        for (double v : x) r2 += v * v;
        return mollified_potential_radial(d, eps, std::sqrt(r2));
      });
      for (int a = 0; a < d; ++a) {
        impl_->gradient_kernels.push_back(
            conv.kernel_spectrum([&](std::span<const double> x, bool origin) {
              if (origin) return 0.0;
              double r2 = 0.0;
              for (double v : x) r2 += v * v;
              return grad_phi.gradient_factor(r2) * x[static_cast<std::size_t>(a)];
            }));
      }
    } else {
      const double origin_value = green_origin_average(d, g.spacing());
      impl_->chemical_kernel = conv.kernel_spectrum(
          [&](std::span<const double> x, bool origin) { return origin ? origin_value : phi.phi(x); });
      for (int a = 0; a < d; ++a) {
        impl_->gradient_kernels.push_back(
            conv.kernel_spectrum([&](std::span<const double> x, bool origin) {
              if (origin) return 0.0;
              double r2 = 0.0;
              for (double v : x) r2 += v * v;
              return phi.gradient_factor(r2) * x[static_cast<std::size_t>(a)];
            }));
      }
    }
  }
  if (need_density) {
    const Mollifier& v = shared_mollifier(d);
    const double eps = params_.kernel.eps_p;
    impl_->density_kernel = conv.kernel_spectrum(
        [&](std::span<const double> x, bool) { return v.eval(x, eps); }, true);
  }
}

MeanFieldOperator::~MeanFieldOperator() = default;
MeanFieldOperator::MeanFieldOperator(MeanFieldOperator&&) noexcept = default;
MeanFieldOperator& MeanFieldOperator::operator=(MeanFieldOperator&&) noexcept = default;

double MeanFieldOperator::pressure_slope(double density) const {
  if (!params_.drifts.repulsion) return 0.0;
  if (impl_->cutoff) return impl_->cutoff->first(density);
  return p_derivative(std::max(density, 0.0), params_.m, 1);
}

PdePotentials MeanFieldOperator::potentials(std::span<const double> u) const {
  const std::size_t cells = params_.grid.cells();
  if (u.size() != cells) throw InvalidArgument("field size does not match grid");
  PdePotentials out;
  out.chemical.assign(cells, 0.0);
  out.pressure.assign(cells, 0.0);
  const bool mollified = params_.mode == PdeMode::kMollified;
  FreeSpaceConvolver::Spectrum spec;
  if (impl_->conv) spec = impl_->conv->forward(u);
  if (params_.drifts.aggregation) out.chemical = impl_->conv->inverse(spec, impl_->chemical_kernel);
  if (mollified && params_.drifts.repulsion) {
    out.density = impl_->conv->inverse(spec, impl_->density_kernel);
  } else {
    out.density.assign(u.begin(), u.end());
  }
  if (params_.drifts.repulsion) {
    for (std::size_t k = 0; k < cells; ++k) {
      out.pressure[k] = impl_->cutoff ? impl_->cutoff->value(out.density[k])
                                      : p_eval(std::max(out.density[k], 0.0), params_.m);
    }
  }
  return out;
}

std::vector<std::vector<double>> MeanFieldOperator::chemical_gradient(
    std::span<const double> u) const {
  const int d = params_.grid.dimension;
  std::vector<std::vector<double>> out;
  if (!params_.drifts.aggregation) {
    out.assign(static_cast<std::size_t>(d), std::vector<double>(params_.grid.cells(), 0.0));
    return out;
  }
  const auto spec = impl_->conv->forward(u);
  for (int a = 0; a < d; ++a) out.push_back(impl_->conv->inverse(spec, impl_->gradient_kernels[a]));
  return out;
}

double MeanFieldOperator::rhs(std::span<const double> u, std::span<double> out) const {
  const GridSpec& g = params_.grid;
  const int d = g.dimension;
  const std::size_t n = g.resolution;
  const std::size_t cells = g.cells();
  if (u.size() != cells || out.size() != cells) throw InvalidArgument("field size does not match grid");
  const double h = g.spacing();
  const double inv_h = 1.0 / h;
  const double sigma = params_.sigma;
  std::fill(out.begin(), out.end(), 0.0);

  const bool advect = params_.drifts.aggregation || params_.drifts.repulsion;
  PdePotentials pot;
  std::vector<double> psi;  // c - pi: face velocity is its difference quotient
  if (advect) {
    pot = potentials(u);
    psi.resize(cells);
    for (std::size_t k = 0; k < cells; ++k) psi[k] = pot.chemical[k] - pot.pressure[k];
  }

  double rate = 2.0 * d * sigma * inv_h * inv_h;
  std::array<std::size_t, 3> idx{};
  for (int a = 0; a < d; ++a) {
    const std::size_t s = g.stride(a);
    double vmax = 0.0;
    // Face between cell k (index j on axis a) and k + s.
    for (std::size_t k = 0; k < cells; ++k) {
      g.unravel(k, std::span<std::size_t>(idx.data(), static_cast<std::size_t>(d)));
      const std::size_t j = idx[a];
      if (j + 1 >= n) continue;
      const std::size_t r = k + s;
      double flux = -sigma * (u[r] - u[k]) * inv_h;
      if (advect) {
        const double v = (psi[r] - psi[k]) * inv_h;
        vmax = std::max(vmax, std::abs(v));
        double face;
        if (v > 0.0) {
          const double back = j >= 1 ? u[k] - u[k - s] : 0.0;
          face = u[k] + 0.5 * minmod(back, u[r] - u[k]);
        } else {
          const double ahead = j + 2 < n ? u[r + s] - u[r] : 0.0;
          face = u[r] - 0.5 * minmod(u[r] - u[k], ahead);
        }
        flux += v * face;
      }
      out[k] -= flux * inv_h;
      out[r] += flux * inv_h;
    }
    rate += 2.0 * vmax * inv_h;
  }
  if (advect && params_.drifts.repulsion) {
    double umax = 0.0;
    double slope = 0.0;
    for (std::size_t k = 0; k < cells; ++k) {
      umax = std::max(umax, u[k]);
      slope = std::max(slope, std::abs(pressure_slope(pot.density[k])));
    }
    rate += 2.0 * d * umax * slope * inv_h * inv_h;
  }
  return rate > 0.0 ? 0.4 / rate : std::numeric_limits<double>::infinity();
}

GridField pde_rhs(const GridField& u, const PdeParams& params) {
  if (!(u.grid == params.grid)) throw InvalidArgument("field grid differs from PDE grid");
  const MeanFieldOperator op(params);
  GridField out(u.grid, u.time);
  op.rhs(u.values, out.values);
  return out;
}

PdeSolution pde_solve(const PdeParams& params, const GridField& initial,
                      const PdeSolveOptions& options) {
  if (!(initial.grid == params.grid)) throw InvalidArgument("initial field grid differs from PDE grid");
  if (!(options.horizon >= 0.0)) throw ConfigError("PDE horizon must be >= 0");
  if (options.dt < 0.0) throw ConfigError("PDE dt must be >= 0");
  std::vector<double> times = options.output_times;
  if (times.empty()) times = {0.0, options.horizon};
  for (double t : times) {
    if (!(t >= 0.0 && t <= options.horizon * (1.0 + 1e-12))) {
      throw ConfigError("PDE output times must lie in [0, horizon]");
    }
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  const MeanFieldOperator op(params);
  const std::size_t cells = params.grid.cells();
  std::vector<double> u = initial.values;
  std::vector<double> k1(cells);
  std::vector<double> stage(cells);
  std::vector<double> k2(cells);
  const double mass0 = initial.mass();
  const double cell = params.grid.cell_volume();

  PdeSolution sol;
  sol.min_value = *std::min_element(u.begin(), u.end());
  double t = initial.time;
  const double t0 = initial.time;
  std::size_t next = 0;
  auto record = [&](double time) {
    GridField f(params.grid, time);
    f.values = u;
    sol.snapshots.push_back(std::move(f));
  };
  while (next < times.size() && times[next] <= 0.0) {
    record(t0);
    ++next;
  }
  while (next < times.size()) {
    const double target = t0 + times[next];
    const double stable = op.rhs(u, k1);
    double dt;
    if (options.dt > 0.0) {
      if (options.dt > stable * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "PDE step " << options.dt << " exceeds the stability limit " << stable;
        throw StepSizeError(msg.str(), stable);
      }
      dt = options.dt;
    } else {
      dt = stable;
    }
    bool hit = false;
    if (t + dt >= target - 1e-12 * std::max(1.0, std::abs(target))) {
      dt = target - t;
      hit = true;
    }
    for (std::size_t k = 0; k < cells; ++k) stage[k] = u[k] + dt * k1[k];
    op.rhs(stage, k2);
    double total = 0.0;
    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < cells; ++k) {
      u[k] = 0.5 * u[k] + 0.5 * (stage[k] + dt * k2[k]);
      total += u[k];
      lowest = std::min(lowest, u[k]);
    }
    t = hit ? target : t + dt;
    ++sol.steps;
    for (double v : u) {
      if (!std::isfinite(v)) throw BlowUpError(0, sol.steps);
    }
    sol.min_value = std::min(sol.min_value, lowest);
    if (mass0 != 0.0) {
      sol.max_mass_drift = std::max(sol.max_mass_drift, std::abs(total * cell - mass0) / std::abs(mass0));
    }
    while (hit && next < times.size() && t0 + times[next] <= t + 1e-12 * std::max(1.0, std::abs(t))) {
      record(t);
      ++next;
    }
  }
  return sol;
}

}  // namespace kslab
