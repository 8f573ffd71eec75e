#include "kslab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "kslab/error.hpp"
#include "kslab/initial_datum.hpp"
#include "kslab/sliced_wasserstein.hpp"

namespace kslab {

ScalingPlan plan_parameters(double particles, double alpha_k, double alpha_p, int dimension,
                            double m) {
  std::vector<std::string> v;
  if (!(particles >= 3.0)) v.push_back("N must be >= 3");
  if (!(alpha_k > 0.0)) v.push_back("alpha_k must be > 0");
  if (!(alpha_p > 0.0)) v.push_back("alpha_p must be > 0");
  if (dimension < 2) v.push_back("dimension must be >= 2");
  if (!(m == 2.0 || m >= 3.0)) v.push_back("m must be 2 or >= 3");
  if (!v.empty()) {
    std::string msg = "invalid plan inputs:";
    for (const auto& s : v) msg += "\n  " + s;
    throw ConfigError(msg);
  }
  ScalingPlan p;
  p.particles = particles;
  p.alpha_k = alpha_k;
  p.alpha_p = alpha_p;
  p.dimension = dimension;
  p.m = m;
  const double d = dimension;
  const double log_n = std::log(particles);
  p.eps_k = std::pow(alpha_k * log_n, -1.0 / d);
  p.eps_p = std::pow(alpha_p * log_n, -1.0 / (d * m - d + 2.0));
  p.lambda = std::pow(p.eps_p, d) / 2.0;
  p.band_warning = p.lambda >= 0.25;
  return p;
}

ScalingPlan plan_parameters(double particles, double alpha_k, double alpha_p, int dimension,
                            double m, double beta, double delta) {
  ScalingPlan p = plan_parameters(particles, alpha_k, alpha_p, dimension, m);
  if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("beta must lie in (0, 1)");
  if (!(delta > 0.0)) throw ConfigError("delta must be > 0");
  const double d = dimension;
  p.beta = beta;
  p.delta = delta;
  p.has_admissibility = true;
  p.admissibility_margin = 1.0 - delta * (2.0 * d * m - 2.0 * d + 2.0) / (d * m - d + 2.0) - beta;
  return p;
}

LineFit rate_fit(std::span<const RatePoint> points) {
  if (points.size() < 3) throw DegenerateFitError("rate fit needs at least 3 points");
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> w;
  bool weighted = true;
  for (const auto& p : points) {
    if (!(p.x > 0.0) || !(p.y > 0.0)) throw InvalidArgument("rate fit needs positive x and y");
    x.push_back(p.x);
    y.push_back(p.y);
    if (!(p.standard_error > 0.0)) weighted = false;
    w.push_back(p.standard_error > 0.0 ? (p.y / p.standard_error) * (p.y / p.standard_error) : 0.0);
  }
  if (!weighted) w.clear();
  return fit_loglog(x, y, w);
}

namespace {

/// Runs replications 0..R-1 (in parallel over replications), keeping the
/// trajectory pairs selected by `pick` and counting aborted replications.
template <class Pick>
void run_replications(const CouplingConfig& cfg, const DriftFieldSeries& mid,
                      const DriftFieldSeries& lim, CoupledSystems systems, int workers, Pick pick,
                      std::vector<Trajectories>& a, std::vector<Trajectories>& b,
                      std::size_t& aborted) {
  const std::size_t reps = cfg.sim.replications;
  std::vector<std::optional<CoupledRun>> runs(reps);
  const long count = static_cast<long>(reps);
#pragma omp parallel for num_threads(std::max(1, workers)) schedule(dynamic)
  for (long r = 0; r < count; ++r) {
    runs[static_cast<std::size_t>(r)] =
        coupled_run(cfg, mid, lim, static_cast<std::uint64_t>(r), systems);
  }
  for (auto& run : runs) {
    if (run->aborted) {
      ++aborted;
      continue;
    }
    auto [x, y] = pick(*run);
    a.push_back(std::move(x));
    b.push_back(std::move(y));
  }
  if (a.empty()) throw OutOfDomainError("every replication left the grid");
}

void fill_metadata(ErrorReport& rep, const SimConfig& sim) {
  rep.particles = sim.particles;
  rep.eps_k = sim.kernel.eps_k;
  rep.eps_p = sim.kernel.eps_p;
  rep.lambda = sim.kernel.lambda;
  rep.sigma = sim.sigma;
}

}  // namespace

StudyResult fluctuation_study(const CouplingConfig& base,
                              std::span<const std::size_t> particle_counts, int workers) {
  if (particle_counts.size() < 3) throw ConfigError("fluctuation study needs at least 3 values of N");
  base.validate();
  base.sim.validate(true);
  StudyResult out;
  const DriftFieldSeries mid = solve_drift_fields(base, PdeMode::kMollified);
  const DriftFieldSeries none;
  for (std::size_t n : particle_counts) {
    CouplingConfig cfg = base;
    cfg.sim.particles = n;
    std::vector<Trajectories> a;
    std::vector<Trajectories> b;
    run_replications(cfg, mid, none, {true, true, false}, workers,
                     [](CoupledRun& r) { return std::pair{std::move(r.interacting), std::move(r.intermediate)}; },
                     a, b, out.aborted);
    ErrorReport rep = trajectory_error(a, b, ErrorAggregation::kMaxThenMean);
    fill_metadata(rep, cfg.sim);
    out.points.push_back({static_cast<double>(n), rep.sup_estimate, rep.sup_standard_error});
    out.reports.push_back(std::move(rep));
  }
  bool positive = true;
  for (const auto& p : out.points) positive = positive && p.y > 0.0;
  if (positive) out.fit = rate_fit(out.points);
  return out;
}

StudyResult meanfield_rate_study(const CouplingConfig& base, std::span<const double> eps_list,
                                 int workers) {
  if (eps_list.size() < 3) throw ConfigError("mean-field rate study needs at least 3 values of eps");
  base.validate();
  StudyResult out;
  const DriftFieldSeries lim = solve_drift_fields(base, PdeMode::kLimit);
  for (double eps : eps_list) {
    if (!(eps > 0.0)) throw ConfigError("eps values must be positive");
    CouplingConfig cfg = base;
    cfg.sim.kernel.eps_k = eps;
    cfg.sim.kernel.eps_p = eps;
    cfg.sim.kernel.lambda = std::pow(eps, cfg.sim.dimension) / 2.0;
    cfg.validate();
    const DriftFieldSeries mid = solve_drift_fields(cfg, PdeMode::kMollified);
    std::vector<Trajectories> a;
    std::vector<Trajectories> b;
    run_replications(cfg, mid, lim, {false, true, true}, workers,
                     [](CoupledRun& r) { return std::pair{std::move(r.intermediate), std::move(r.limit)}; },
                     a, b, out.aborted);
    ErrorReport rep = trajectory_error(a, b, ErrorAggregation::kMeanSquare);
    fill_metadata(rep, cfg.sim);
    out.points.push_back({2.0 * eps, rep.sup_estimate, rep.sup_standard_error});
    out.reports.push_back(std::move(rep));
  }
  bool positive = true;
  for (const auto& p : out.points) positive = positive && p.y > 0.0;
  if (positive) out.fit = rate_fit(out.points);
  return out;
}

double independence_statistic(std::span<const double> a, std::span<const double> b, int dimension) {
  const std::size_t d = static_cast<std::size_t>(dimension);
  if (d == 0 || a.size() != b.size() || a.size() % d != 0) {
    throw InvalidArgument("independence statistic needs equal-shape samples");
  }
  const std::size_t n = a.size() / d;
  if (n < 2) throw InvalidArgument("independence statistic needs at least 2 samples");
  auto column = [&](std::span<const double> s, std::size_t c) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = s[i * d + c];
    return v;
  };
  double worst = 0.0;
  for (std::size_t ca = 0; ca < d; ++ca) {
    const auto x = column(a, ca);
    for (std::size_t cb = 0; cb < d; ++cb) {
      const auto y = column(b, cb);
      double mx = 0.0;
      double my = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
      }
      mx /= static_cast<double>(n);
      my /= static_cast<double>(n);
      double sxy = 0.0;
      double sxx = 0.0;
      double syy = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
      }
      if (sxx > 0.0 && syy > 0.0) worst = std::max(worst, std::abs(sxy) / std::sqrt(sxx * syy));
    }
  }
  return worst;
}

MarginalReport marginal_metrics(std::span<const ParticleEnsemble> ensembles,
                                const GridField& reference, std::uint64_t seed,
                                std::size_t directions) {
  if (ensembles.empty()) throw InvalidArgument("marginal metrics need at least one ensemble");
  if (std::abs(reference.mass() - 1.0) > 1e-6) {
    throw InvalidArgument("reference field must have unit mass");
  }
  const int d = reference.grid.dimension;
  for (const auto& e : ensembles) {
    if (e.dimension() != d) throw InvalidArgument("ensemble dimension differs from reference");
    if (e.size() < 2) throw InvalidArgument("marginal metrics need N >= 2");
  }
  MarginalReport rep;
  rep.replications = ensembles.size();
  rep.directions = directions;
  const auto dirs = projection_directions(d, directions, seed);
  const WeightedPoints ref = field_points(reference);

  // Particles are picked by identity key so the metric ignores storage order.
  auto by_key = [&](const ParticleEnsemble& e, std::size_t rank) {
    const auto order = e.key_order();
    const auto x = e.position(order[rank]);
    return std::vector<double>(x.begin(), x.end());
  };
  const auto pooled = ensembles[0].positions();
  rep.w1_pooled = sliced_w1(pooled, ref, dirs);
  const std::size_t n = ensembles[0].size();
  rep.baseline = sliced_w1(sample_field(reference, n, seed), ref, dirs);

  std::vector<double> p1;
  std::vector<double> p2;
  for (const auto& e : ensembles) {
    const auto a = by_key(e, 0);
    const auto b = by_key(e, 1);
    p1.insert(p1.end(), a.begin(), a.end());
    p2.insert(p2.end(), b.begin(), b.end());
  }
  rep.w1_particle1 = sliced_w1(p1, ref, dirs);
  rep.w1_particle2 = sliced_w1(p2, ref, dirs);
  if (ensembles.size() >= 2) rep.independence = independence_statistic(p1, p2, d);
  return rep;
}

}  // namespace kslab
