#include "kslab/particle_system.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cell_list.hpp"
#include "kslab/error.hpp"
#include "pair_sums.hpp"
#include "update.hpp"

namespace kslab {

namespace {

using detail::PairConstants;
using detail::pair_sums;

/// Positions copied into ascending identity-key order.
std::vector<double> key_sorted(const ParticleEnsemble& ens) {
  const std::size_t d = static_cast<std::size_t>(ens.dimension());
  const auto order = ens.key_order();
  std::vector<double> out(ens.size() * d);
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto x = ens.position(order[k]);
    std::copy(x.begin(), x.end(), out.begin() + static_cast<std::ptrdiff_t>(k * d));
  }
  return out;
}

struct RawSums {
  double agg[3] = {0, 0, 0};
  double rho = 0.0;
  double grad[3] = {0, 0, 0};
};

template <bool Agg, bool Rep>
RawSums sums_at(int d, const double* xi, const std::vector<double>& sorted, std::size_t n,
                const PairConstants& c) {
  RawSums s;
  if (d == 2) {
    pair_sums<2, Agg, Rep>(xi, sorted.data(), n, c, s.agg, s.rho, s.grad);
  } else {
    pair_sums<3, Agg, Rep>(xi, sorted.data(), n, c, s.agg, s.rho, s.grad);
  }
  return s;
}

/// Final drift from raw sums. Only the enabled parts are read.
void finish_drift(int d, const RawSums& s, const PairConstants& c, const InteractionModel& model,
                  bool agg, bool rep, double inv_n, double* out) {
  for (int a = 0; a < d; ++a) out[a] = 0.0;
  if (agg) {
    for (int a = 0; a < d; ++a) out[a] += -c.inv_area * s.agg[a] * inv_n;
  }
  if (rep) {
    const double rho = c.density_scale * s.rho;
    const double slope = model.pressure().first(rho);
    if (slope != 0.0) {
      for (int a = 0; a < d; ++a) out[a] -= slope * c.gradient_scale * s.grad[a];
    }
  }
}

template <int D>
void repulsion_celllist_pass(const std::vector<double>& sorted, std::size_t n,
                             const PairConstants& c, const detail::CellList& cells,
                             std::span<const std::size_t> rank, double* rho_out,
                             double* grad_out, int workers) {
  const long count = static_cast<long>(n);
#pragma omp parallel for num_threads(workers) schedule(static)
  for (long ii = 0; ii < count; ++ii) {
    const std::size_t k = static_cast<std::size_t>(ii);
    const double* xi = sorted.data() + k * D;
    double rho = 0.0;
    double grad[D] = {};
    cells.for_each_candidate(xi, [&](std::size_t j) {
      const double* xj = sorted.data() + j * D;
      double dx[D];
      double r2 = 0.0;
      for (int a = 0; a < D; ++a) {
        dx[a] = xi[a] - xj[a];
        r2 += dx[a] * dx[a];
      }
      if (r2 < c.eps_p2) {
        const double w = 1.0 - r2 * c.inv_eps_p2;
        const double e = std::exp(-1.0 / w);
        rho += e;
        const double g = e / (w * w);
        for (int a = 0; a < D; ++a) grad[a] += g * dx[a];
      }
    });
    const std::size_t i = rank[k];
    rho_out[i] = rho;
    for (int a = 0; a < D; ++a) grad_out[i * D + a] = grad[a];
  }
}

/// Raw cell-list sums (sum e, sum e/w^2 dx) scattered back to ensemble order.
void raw_repulsion_celllist(const ParticleEnsemble& ens, const std::vector<double>& sorted,
                            const PairConstants& c, double cell_width, double eps_p,
                            std::vector<double>& rho, std::vector<double>& grad, int workers) {
  if (cell_width < eps_p) {
    std::ostringstream msg;
    msg << "cell width " << cell_width << " is smaller than eps_p " << eps_p;
    throw ConfigError(msg.str());
  }
  const int d = ens.dimension();
  const std::size_t n = ens.size();
  detail::CellList cells(d, cell_width);
  cells.build(sorted, n);
  const auto order = ens.key_order();
  rho.assign(n, 0.0);
  grad.assign(n * static_cast<std::size_t>(d), 0.0);
  if (d == 2) {
    repulsion_celllist_pass<2>(sorted, n, c, cells, order, rho.data(), grad.data(), workers);
  } else {
    repulsion_celllist_pass<3>(sorted, n, c, cells, order, rho.data(), grad.data(), workers);
  }
}

void check_model(const ParticleEnsemble& ens, const InteractionModel& model) {
  if (ens.dimension() != model.dimension()) {
    throw InvalidArgument("ensemble and interaction model dimensions differ");
  }
}

void check_out(std::span<double> out, std::size_t expected, const char* name) {
  if (out.size() != expected) {
    throw InvalidArgument(std::string(name) + " has the wrong length");
  }
}

}  // namespace

std::vector<std::string> SimConfig::violations(bool check_stability_cap) const {
  std::vector<std::string> v;
  auto add = [&](const std::string& s) { v.push_back(s); };
  if (dimension != 2 && dimension != 3) add("dimension must be 2 or 3");
  if (!(m == 2.0 || m >= 3.0)) add("m must be 2 or >= 3");
  if (particles < 1) add("particles must be >= 1");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) add("sigma must be >= 0");
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) add("horizon must be >= 0");
  if (!(dt > 0.0) || !std::isfinite(dt)) add("dt must be > 0");
  if (!(kernel.eps_k > 0.0)) add("eps_k must be > 0");
  if (!(kernel.eps_p > 0.0)) add("eps_p must be > 0");
  if (!(kernel.lambda > 0.0)) add("lambda must be > 0");
  const bool dim_ok = dimension == 2 || dimension == 3;
  if (dim_ok && kernel.eps_p > 0.0 && kernel.lambda > 0.0) {
    const double band = std::pow(kernel.eps_p, dimension) / 2.0;
    if (kernel.lambda > band * (1.0 + 1e-12)) {
      add("lambda must be <= eps_p^d/2 (band constraint)");
    }
    if (kernel.lambda > 0.25) add("lambda must be <= 1/4 so the cutoff bands are disjoint");
  }
  if (replications < 1) add("replications must be >= 1");
  for (double t : output_times) {
    if (!(t >= 0.0 && t <= horizon * (1.0 + 1e-12))) {
      add("output times must lie in [0, horizon]");
      break;
    }
  }
  if (cell_width != 0.0 && !(cell_width >= kernel.eps_p)) add("cell_width must be >= eps_p");
  if (workers < 1) add("workers must be >= 1");
  if (dim_ok) {
    try {
      initial.validate(dimension);
    } catch (const Error& e) {
      add(e.what());
    }
  }
  if (v.empty() && check_stability_cap && horizon > 0.0) {
    try {
      const InteractionModel model(dimension, m, kernel, drifts);
      const double cap = model.stability_cap();
      if (effective_dt() > cap) {
        std::ostringstream msg;
        msg << "dt " << effective_dt() << " exceeds the stability cap " << cap;
        add(msg.str());
      }
    } catch (const Error& e) {
      add(e.what());
    }
  }
  return v;
}

void SimConfig::validate(bool check_stability_cap) const {
  const auto v = violations(check_stability_cap);
  if (v.empty()) return;
  std::string msg = "invalid simulation config:";
  for (const auto& s : v) msg += "\n  " + s;
  throw ConfigError(msg);
}

std::size_t SimConfig::steps() const {
  if (horizon <= 0.0) return 0;
  const double ratio = horizon / dt;
  return static_cast<std::size_t>(std::max(1.0, std::ceil(ratio - 1e-9)));
}

double SimConfig::effective_dt() const {
  const std::size_t s = steps();
  return s == 0 ? dt : horizon / static_cast<double>(s);
}

std::vector<std::size_t> SimConfig::output_steps() const {
  const std::size_t total = steps();
  std::vector<std::size_t> out;
  if (output_times.empty()) {
    out = {0, total};
  } else {
    const double h = effective_dt();
    for (double t : output_times) {
      const double k = total == 0 ? 0.0 : std::round(t / h);
      out.push_back(std::min(total, static_cast<std::size_t>(std::max(0.0, k))));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<double> aggregation_drift(const ParticleEnsemble& ensemble, std::size_t i,
                                      const InteractionModel& model) {
  check_model(ensemble, model);
  const int d = ensemble.dimension();
  const auto sorted = key_sorted(ensemble);
  const auto c = PairConstants::from(model, ensemble.size());
  const auto s = sums_at<true, false>(d, ensemble.position(i).data(), sorted, ensemble.size(), c);
  std::vector<double> out(static_cast<std::size_t>(d));
  finish_drift(d, s, c, model, true, false, 1.0 / static_cast<double>(ensemble.size()),
               out.data());
  return out;
}

double mollified_empirical_density(const ParticleEnsemble& ensemble, std::size_t i,
                                   const InteractionModel& model) {
  check_model(ensemble, model);
  const auto sorted = key_sorted(ensemble);
  const auto c = PairConstants::from(model, ensemble.size());
  const auto s = sums_at<false, true>(ensemble.dimension(), ensemble.position(i).data(), sorted,
                                      ensemble.size(), c);
  return c.density_scale * s.rho;
}

std::vector<double> repulsion_drift(const ParticleEnsemble& ensemble, std::size_t i,
                                    const InteractionModel& model) {
  check_model(ensemble, model);
  const int d = ensemble.dimension();
  const auto sorted = key_sorted(ensemble);
  const auto c = PairConstants::from(model, ensemble.size());
  const auto s = sums_at<false, true>(d, ensemble.position(i).data(), sorted, ensemble.size(), c);
  std::vector<double> out(static_cast<std::size_t>(d));
  finish_drift(d, s, c, model, false, true, 1.0 / static_cast<double>(ensemble.size()),
               out.data());
  return out;
}

namespace {

template <int D, bool Agg, bool Rep>
void direct_pass(const ParticleEnsemble& ens, const std::vector<double>& sorted,
                 const PairConstants& c, const InteractionModel& model, double* out,
                 int workers) {
  const std::size_t n = ens.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  const auto pos = ens.positions();
  const long count = static_cast<long>(n);
#pragma omp parallel for num_threads(workers) schedule(static)
  for (long ii = 0; ii < count; ++ii) {
    const std::size_t i = static_cast<std::size_t>(ii);
    RawSums s;
    pair_sums<D, Agg, Rep>(pos.data() + i * D, sorted.data(), n, c, s.agg, s.rho, s.grad);
    finish_drift(D, s, c, model, Agg, Rep, inv_n, out + i * D);
  }
}

template <bool Agg, bool Rep>
void direct_dispatch(const ParticleEnsemble& ens, const std::vector<double>& sorted,
                     const PairConstants& c, const InteractionModel& model, double* out,
                     int workers) {
  if (ens.dimension() == 2) {
    direct_pass<2, Agg, Rep>(ens, sorted, c, model, out, workers);
  } else {
    direct_pass<3, Agg, Rep>(ens, sorted, c, model, out, workers);
  }
}

}  // namespace

void drift_all_direct(const ParticleEnsemble& ensemble, const InteractionModel& model,
                      std::span<double> out, int workers) {
  check_model(ensemble, model);
  check_out(out, ensemble.size() * static_cast<std::size_t>(ensemble.dimension()), "drift");
  std::fill(out.begin(), out.end(), 0.0);
  if (ensemble.size() == 0) return;
  const bool agg = model.switches().aggregation;
  const bool rep = model.switches().repulsion;
  if (!agg && !rep) return;
  const auto sorted = key_sorted(ensemble);
  const auto c = PairConstants::from(model, ensemble.size());
  workers = std::max(1, workers);
  if (agg && rep) {
    direct_dispatch<true, true>(ensemble, sorted, c, model, out.data(), workers);
  } else if (agg) {
    direct_dispatch<true, false>(ensemble, sorted, c, model, out.data(), workers);
  } else {
    direct_dispatch<false, true>(ensemble, sorted, c, model, out.data(), workers);
  }
}

void drift_all_celllist(const ParticleEnsemble& ensemble, const InteractionModel& model,
                        double cell_width, std::span<double> out, int workers) {
  check_model(ensemble, model);
  const int d = ensemble.dimension();
  const std::size_t n = ensemble.size();
  check_out(out, n * static_cast<std::size_t>(d), "drift");
  if (cell_width < model.params().eps_p) {
    throw ConfigError("cell width must be at least eps_p");
  }
  std::fill(out.begin(), out.end(), 0.0);
  if (n == 0) return;
  workers = std::max(1, workers);
  const auto sorted = key_sorted(ensemble);
  const auto c = PairConstants::from(model, n);
  if (model.switches().aggregation) {
    direct_dispatch<true, false>(ensemble, sorted, c, model, out.data(), workers);
  }
  if (model.switches().repulsion) {
    std::vector<double> rho;
    std::vector<double> grad;
    raw_repulsion_celllist(ensemble, sorted, c, cell_width, model.params().eps_p, rho, grad,
                           workers);
    for (std::size_t i = 0; i < n; ++i) {
      const double slope = model.pressure().first(c.density_scale * rho[i]);
      if (slope == 0.0) continue;
      for (int a = 0; a < d; ++a) {
        out[i * d + a] -= slope * c.gradient_scale * grad[i * d + a];
      }
    }
  }
}

void repulsion_sums_direct(const ParticleEnsemble& ensemble, const InteractionModel& model,
                           std::span<double> density, std::span<double> gradient,
                           int workers) {
  check_model(ensemble, model);
  const int d = ensemble.dimension();
  const std::size_t n = ensemble.size();
  check_out(density, n, "density");
  check_out(gradient, n * static_cast<std::size_t>(d), "gradient");
  if (n == 0) return;
  const auto sorted = key_sorted(ensemble);
  const auto c = PairConstants::from(model, n);
  const long count = static_cast<long>(n);
  workers = std::max(1, workers);
#pragma omp parallel for num_threads(workers) schedule(static)
  for (long ii = 0; ii < count; ++ii) {
    const std::size_t i = static_cast<std::size_t>(ii);
    const auto s = sums_at<false, true>(d, ensemble.position(i).data(), sorted, n, c);
    density[i] = c.density_scale * s.rho;
    for (int a = 0; a < d; ++a) gradient[i * d + a] = c.gradient_scale * s.grad[a];
  }
}

void repulsion_sums_celllist(const ParticleEnsemble& ensemble, const InteractionModel& model,
                             double cell_width, std::span<double> density,
                             std::span<double> gradient, int workers) {
  check_model(ensemble, model);
  const int d = ensemble.dimension();
  const std::size_t n = ensemble.size();
  check_out(density, n, "density");
  check_out(gradient, n * static_cast<std::size_t>(d), "gradient");
  if (n == 0) {
    if (cell_width < model.params().eps_p) throw ConfigError("cell width must be at least eps_p");
    return;
  }
  const auto sorted = key_sorted(ensemble);
  const auto c = PairConstants::from(model, n);
  std::vector<double> rho;
  std::vector<double> grad;
  raw_repulsion_celllist(ensemble, sorted, c, cell_width, model.params().eps_p, rho, grad,
                         std::max(1, workers));
  for (std::size_t i = 0; i < n; ++i) {
    density[i] = c.density_scale * rho[i];
    for (int a = 0; a < d; ++a) gradient[i * d + a] = c.gradient_scale * grad[i * d + a];
  }
}

EulerMaruyamaStepper::EulerMaruyamaStepper(const InteractionModel& model, double sigma,
                                           const NoiseStream& noise, DriftMethod method,
                                           double cell_width, int workers)
    : model_(model),
      sigma_(sigma),
      noise_(noise),
      method_(method),
      cell_width_(cell_width > 0.0 ? cell_width : model.params().eps_p),
      workers_(std::max(1, workers)) {
  if (!(sigma >= 0.0)) throw InvalidArgument("sigma must be >= 0");
  if (method == DriftMethod::kCellList && cell_width_ < model.params().eps_p) {
    throw ConfigError("cell width must be at least eps_p");
  }
}

void EulerMaruyamaStepper::step(ParticleEnsemble& ensemble, double dt,
                                std::uint64_t replication, std::uint64_t step_index) {
  const int d = ensemble.dimension();
  const std::size_t n = ensemble.size();
  drift_.assign(n * static_cast<std::size_t>(d), 0.0);
  if (method_ == DriftMethod::kCellList) {
    drift_all_celllist(ensemble, model_, cell_width_, drift_, workers_);
  } else {
    drift_all_direct(ensemble, model_, drift_, workers_);
  }
  const double scale = std::sqrt(2.0 * sigma_);
  const auto ids = ensemble.ids();
  double inc[3];
  for (std::size_t i = 0; i < n; ++i) {
    const double* noise = nullptr;
    if (sigma_ > 0.0) {
      noise_.increment(replication, ids[i], step_index, dt,
                       std::span<double>(inc, static_cast<std::size_t>(d)));
      noise = inc;
    }
    auto x = ensemble.position(i);
    detail::apply_update(x, drift_.data() + i * d, dt, scale, noise);
    if (!detail::all_finite(x)) throw BlowUpError(i, step_index);
  }
  ensemble.set_time(ensemble.time() + dt);
}

ParticleEnsemble em_step(const ParticleEnsemble& ensemble, const InteractionModel& model,
                         double dt, double sigma, const NoiseStream& noise,
                         std::uint64_t replication, std::uint64_t step_index) {
  ParticleEnsemble next = ensemble;
  EulerMaruyamaStepper stepper(model, sigma, noise);
  stepper.step(next, dt, replication, step_index);
  return next;
}

std::vector<ParticleEnsemble> simulate(const SimConfig& config, std::uint64_t replication) {
  config.validate();
  const InteractionModel model(config.dimension, config.m, config.kernel, config.drifts);
  const NoiseStream noise(config.seed);
  ParticleEnsemble ens =
      sample_initial(config.initial, config.dimension, config.particles, config.seed, replication);
  EulerMaruyamaStepper stepper(model, config.sigma, noise, config.method, config.cell_width,
                               config.workers);
  const auto outputs = config.output_steps();
  const std::size_t total = config.steps();
  const double h = config.effective_dt();
  std::vector<ParticleEnsemble> snaps;
  std::size_t next = 0;
  for (std::size_t k = 0;; ++k) {
    if (next < outputs.size() && outputs[next] == k) {
      ens.set_time(static_cast<double>(k) * h);
      snaps.push_back(ens);
      ++next;
    }
    if (k == total) break;
    stepper.step(ens, h, replication, k);
  }
  return snaps;
}

}  // namespace kslab
