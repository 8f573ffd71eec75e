#include "kslab/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kslab/error.hpp"
#include "kslab/initial_datum.hpp"
#include "kslab/noise.hpp"
#include "update.hpp"

namespace kslab {

DriftFieldSeries::DriftFieldSeries(const PdeParams& params, std::span<const GridField> snapshots)
    : params_(params) {
  if (snapshots.empty()) throw InvalidArgument("drift series needs at least one snapshot");
  if (params.mode == PdeMode::kMollified && params.drifts.repulsion) {
    cutoff_.emplace(params.m, params.kernel.lambda);
  }
  const MeanFieldOperator op(params);
  for (const GridField& u : snapshots) {
    if (!(u.grid == params.grid)) throw InvalidArgument("snapshot grid differs from PDE grid");
    if (!times_.empty() && !(u.time > times_.back())) {
      throw InvalidArgument("snapshot times must increase");
    }
    times_.push_back(u.time);
    Frame f;
    for (auto& comp : op.chemical_gradient(u.values)) {
      GridField g(params.grid, u.time);
      g.values = std::move(comp);
      f.chemical_gradient.push_back(std::move(g));
    }
    f.density = GridField(params.grid, u.time);
    f.density.values = op.potentials(u.values).density;
    frames_.push_back(std::move(f));
  }
}

void DriftFieldSeries::frame_drift(const Frame& f, std::span<const double> x,
                                   std::span<double> out) const {
  const int d = dimension();
  for (int a = 0; a < d; ++a) out[a] = 0.0;
  if (params_.drifts.aggregation) {
    for (int a = 0; a < d; ++a) out[a] = interpolate_field(f.chemical_gradient[a], x);
  }
  if (params_.drifts.repulsion) {
    double grad[3];
    const double r =
        interpolate_value_and_gradient(f.density, x, std::span<double>(grad, static_cast<std::size_t>(d)));
    const double slope =
        cutoff_ ? cutoff_->first(r) : p_derivative(std::max(r, 0.0), params_.m, 1);
    for (int a = 0; a < d; ++a) out[a] -= slope * grad[a];
  }
}

void DriftFieldSeries::drift(double t, std::span<const double> x, std::span<double> out) const {
  const int d = dimension();
  if (static_cast<int>(x.size()) != d || static_cast<int>(out.size()) != d) {
    throw InvalidArgument("drift point has the wrong dimension");
  }
  if (!params_.drifts.aggregation && !params_.drifts.repulsion) {
    for (int a = 0; a < d; ++a) out[a] = 0.0;
    return;
  }
  if (times_.empty()) throw InvalidArgument("drift series is empty");
  const double tol = 1e-9 * std::max(1.0, std::abs(times_.back()));
  if (t < times_.front() - tol || t > times_.back() + tol) {
    throw OutOfDomainError("time " + std::to_string(t) + " outside the stored field range");
  }
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t hi = static_cast<std::size_t>(it - times_.begin());
  if (hi == 0) hi = 1;
  if (hi >= times_.size()) hi = times_.size() - 1;
  if (times_.size() == 1) {
    frame_drift(frames_[0], x, out);
    return;
  }
  const std::size_t lo = hi - 1;
  const double theta = std::clamp((t - times_[lo]) / (times_[hi] - times_[lo]), 0.0, 1.0);
  double a_lo[3];
  double a_hi[3];
  frame_drift(frames_[lo], x, std::span<double>(a_lo, static_cast<std::size_t>(d)));
  if (theta == 0.0) {
    for (int a = 0; a < d; ++a) out[a] = a_lo[a];
    return;
  }
  frame_drift(frames_[hi], x, std::span<double>(a_hi, static_cast<std::size_t>(d)));
  for (int a = 0; a < d; ++a) out[a] = (1.0 - theta) * a_lo[a] + theta * a_hi[a];
}

std::vector<std::string> CouplingConfig::violations() const {
  auto v = sim.violations(false);
  if (grid.dimension != sim.dimension) v.push_back("grid dimension must equal the particle dimension");
  if (grid.resolution < 4 || grid.resolution % 2 != 0) v.push_back("grid resolution must be even and >= 4");
  if (!(grid.half_width > 0.0)) v.push_back("grid half_width must be positive");
  if (!(field_store_interval > 0.0)) v.push_back("field_store_interval must be positive");
  if (pde_dt < 0.0) v.push_back("pde dt must be >= 0");
  return v;
}

void CouplingConfig::validate() const {
  const auto v = violations();
  if (v.empty()) return;
  std::string msg = "invalid coupling config:";
  for (const auto& s : v) msg += "\n  " + s;
  throw ConfigError(msg);
}

DriftFieldSeries solve_drift_fields(const CouplingConfig& config, PdeMode mode) {
  config.validate();
  PdeParams params;
  params.m = config.sim.m;
  params.sigma = config.sim.sigma;
  params.kernel = config.sim.kernel;
  params.drifts = config.sim.drifts;
  params.grid = config.grid;
  params.mode = mode;
  const GridField u0 = discretize(config.sim.initial, config.grid);
  PdeSolveOptions opts;
  opts.horizon = config.sim.horizon;
  opts.dt = config.pde_dt;
  const std::size_t frames =
      static_cast<std::size_t>(std::ceil(config.sim.horizon / config.field_store_interval - 1e-9));
  for (std::size_t k = 0; k <= frames; ++k) {
    opts.output_times.push_back(
        std::min(config.sim.horizon, static_cast<double>(k) * config.field_store_interval));
  }
  if (config.sim.horizon == 0.0) opts.output_times = {0.0};
  const PdeSolution sol = pde_solve(params, u0, opts);
  return DriftFieldSeries(params, sol.snapshots);
}

namespace {

void record(Trajectories& tr, double t, std::span<const double> pos) {
  tr.times.push_back(t);
  tr.positions.emplace_back(pos.begin(), pos.end());
}

Trajectories empty_like(const ParticleEnsemble& ens) {
  Trajectories tr;
  tr.dimension = ens.dimension();
  tr.particles = ens.size();
  return tr;
}

/// One Euler-Maruyama step of a field-driven system; drifts at the step start.
void field_step(const DriftFieldSeries& fields, std::vector<double>& pos, int d, double t,
                double dt, double scale, const std::vector<double>& increments, bool noisy,
                std::uint64_t step) {
  const std::size_t n = pos.size() / static_cast<std::size_t>(d);
  double b[3];
  for (std::size_t i = 0; i < n; ++i) {
    std::span<double> x(pos.data() + i * d, static_cast<std::size_t>(d));
    fields.drift(t, x, std::span<double>(b, static_cast<std::size_t>(d)));
    detail::apply_update(x, b, dt, scale, noisy ? increments.data() + i * d : nullptr);
    if (!detail::all_finite(x)) throw BlowUpError(i, step);
  }
}

}  // namespace

Trajectories simulate_field_driven(const CouplingConfig& config, const DriftFieldSeries& fields,
                                   const ParticleEnsemble& initial, std::uint64_t replication) {
  config.validate();
  const int d = config.sim.dimension;
  if (initial.dimension() != d) throw InvalidArgument("initial ensemble dimension mismatch");
  const NoiseStream noise(config.sim.seed);
  const std::size_t total = config.sim.steps();
  const double h = config.sim.effective_dt();
  const double scale = std::sqrt(2.0 * config.sim.sigma);
  const bool noisy = config.sim.sigma > 0.0;
  const auto outputs = config.sim.output_steps();
  const auto ids = initial.ids();
  std::vector<double> pos(initial.positions().begin(), initial.positions().end());
  std::vector<double> inc(pos.size());
  Trajectories tr = empty_like(initial);
  std::size_t next = 0;
  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * h;
    if (next < outputs.size() && outputs[next] == k) {
      record(tr, t, pos);
      ++next;
    }
    if (k == total) break;
    if (noisy) {
      for (std::size_t i = 0; i < initial.size(); ++i) {
        noise.increment(replication, ids[i], k, h,
                        std::span<double>(inc.data() + i * d, static_cast<std::size_t>(d)));
      }
    }
    field_step(fields, pos, d, t, h, scale, inc, noisy, k);
  }
  return tr;
}

Trajectories simulate_intermediate(const CouplingConfig& config, const DriftFieldSeries& fields,
                                   std::uint64_t replication) {
  const auto ens = sample_initial(config.sim.initial, config.sim.dimension, config.sim.particles,
                                  config.sim.seed, replication);
  return simulate_field_driven(config, fields, ens, replication);
}

Trajectories simulate_limit(const CouplingConfig& config, const DriftFieldSeries& fields,
                            std::uint64_t replication) {
  return simulate_intermediate(config, fields, replication);
}

CoupledRun coupled_run(const CouplingConfig& config, const DriftFieldSeries& intermediate_fields,
                       const DriftFieldSeries& limit_fields, std::uint64_t replication,
                       CoupledSystems systems) {
  config.validate();
  if (systems.interacting) config.sim.validate(true);
  const SimConfig& sim = config.sim;
  const int d = sim.dimension;
  const bool run_mid = systems.intermediate && !intermediate_fields.empty();
  const bool run_lim = systems.limit && !limit_fields.empty();
  const NoiseStream noise(sim.seed);
  ParticleEnsemble ens = sample_initial(sim.initial, d, sim.particles, sim.seed, replication);
  const InteractionModel model(d, sim.m, sim.kernel, sim.drifts);
  EulerMaruyamaStepper stepper(model, sim.sigma, noise, sim.method, sim.cell_width, 1);

  CoupledRun run;
  run.replication = replication;
  run.interacting = empty_like(ens);
  run.intermediate = empty_like(ens);
  run.limit = empty_like(ens);
  std::vector<double> mid(ens.positions().begin(), ens.positions().end());
  std::vector<double> lim = mid;
  std::vector<double> inc(mid.size());

  const std::size_t total = sim.steps();
  const double h = sim.effective_dt();
  const double scale = std::sqrt(2.0 * sim.sigma);
  const bool noisy = sim.sigma > 0.0;
  const auto outputs = sim.output_steps();
  const auto ids = ens.ids();
  std::size_t next = 0;
  try {
    for (std::size_t k = 0;; ++k) {
      const double t = static_cast<double>(k) * h;
      if (next < outputs.size() && outputs[next] == k) {
        if (systems.interacting) record(run.interacting, t, ens.positions());
        if (run_mid) record(run.intermediate, t, mid);
        if (run_lim) record(run.limit, t, lim);
        ++next;
      }
      if (k == total) break;
      if (noisy && (run_mid || run_lim)) {
        for (std::size_t i = 0; i < ens.size(); ++i) {
          noise.increment(replication, ids[i], k, h,
                          std::span<double>(inc.data() + i * d, static_cast<std::size_t>(d)));
        }
      }
      if (systems.interacting) stepper.step(ens, h, replication, k);
      if (run_mid) field_step(intermediate_fields, mid, d, t, h, scale, inc, noisy, k);
      if (run_lim) field_step(limit_fields, lim, d, t, h, scale, inc, noisy, k);
    }
  } catch (const OutOfDomainError& e) {
    run.aborted = true;
    run.abort_reason = e.what();
  }
  return run;
}

std::string to_string(ErrorAggregation a) {
  return a == ErrorAggregation::kMaxThenMean ? "max_then_mean" : "mean_square";
}

ErrorReport trajectory_error(std::span<const Trajectories> a, std::span<const Trajectories> b,
                             ErrorAggregation metric) {
  if (a.size() != b.size()) throw InvalidArgument("trajectory sets differ in replication count");
  if (a.empty()) throw InvalidArgument("trajectory sets are empty");
  ErrorReport rep;
  rep.metric = metric;
  rep.replications = a.size();
  rep.particles = a[0].particles;
  rep.times = a[0].times;
  const std::size_t nt = rep.times.size();
  rep.samples.assign(nt, std::vector<double>(a.size(), 0.0));
  for (std::size_t r = 0; r < a.size(); ++r) {
    const Trajectories& x = a[r];
    const Trajectories& y = b[r];
    if (x.dimension != y.dimension || x.particles != y.particles || x.times != y.times ||
        x.times != rep.times || x.particles != rep.particles ||
        x.positions.size() != nt || y.positions.size() != nt) {
      throw InvalidArgument("trajectory shapes differ");
    }
    const std::size_t d = static_cast<std::size_t>(x.dimension);
    for (std::size_t k = 0; k < nt; ++k) {
      if (x.positions[k].size() != x.particles * d || y.positions[k].size() != x.particles * d) {
        throw InvalidArgument("trajectory shapes differ");
      }
      double agg = 0.0;
      for (std::size_t i = 0; i < x.particles; ++i) {
        double s = 0.0;
        for (std::size_t c = 0; c < d; ++c) {
          const double diff = x.positions[k][i * d + c] - y.positions[k][i * d + c];
          s += diff * diff;
        }
        agg = metric == ErrorAggregation::kMaxThenMean ? std::max(agg, s) : agg + s;
      }
      if (metric == ErrorAggregation::kMeanSquare && x.particles > 0) {
        agg /= static_cast<double>(x.particles);
      }
      rep.samples[k][r] = agg;
    }
  }
  const double count = static_cast<double>(a.size());
  for (std::size_t k = 0; k < nt; ++k) {
    double mean = 0.0;
    for (double v : rep.samples[k]) mean += v;
    mean /= count;
    double var = 0.0;
    for (double v : rep.samples[k]) var += (v - mean) * (v - mean);
    const double se = a.size() > 1 ? std::sqrt(var / (count - 1.0) / count) : 0.0;
    rep.estimate.push_back(mean);
    rep.standard_error.push_back(se);
    if (k == 0 || mean > rep.sup_estimate) {
      rep.sup_estimate = mean;
      rep.sup_standard_error = se;
    }
  }
  return rep;
}

}  // namespace kslab
