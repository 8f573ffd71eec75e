#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kslab/ensemble.hpp"
#include "kslab/mean_field_pde.hpp"
#include "kslab/particle_system.hpp"

namespace kslab {

/// Mean-field drift b(t, x) = grad c(t, x) - P'(r(t, x)) grad r(t, x) read from
/// stored PDE snapshots, where r is V^{eps_p} * u with P = p_lambda (mollified)
/// or r = u with P = p (limit). Linear in t between snapshots, multilinear in x.
class DriftFieldSeries {
 public:
  DriftFieldSeries() = default;
  DriftFieldSeries(const PdeParams& params, std::span<const GridField> snapshots);

  bool empty() const noexcept { return times_.empty(); }
  int dimension() const noexcept { return params_.grid.dimension; }
  const PdeParams& params() const noexcept { return params_; }
  std::span<const double> times() const noexcept { return times_; }

  /// Throws OutOfDomainError outside the grid margin or the stored time range.
  void drift(double t, std::span<const double> x, std::span<double> out) const;

 private:
  struct Frame {
    std::vector<GridField> chemical_gradient;
    GridField density;
  };
  void frame_drift(const Frame& f, std::span<const double> x, std::span<double> out) const;

  PdeParams params_{};
  std::vector<double> times_;
  std::vector<Frame> frames_;
  std::optional<CutoffPressure> cutoff_;
};

/// Positions of N particles at a list of times; positions[k] has N*d entries.
struct Trajectories {
  int dimension = 0;
  std::size_t particles = 0;
  std::vector<double> times;
  std::vector<std::vector<double>> positions;

  bool operator==(const Trajectories&) const = default;
};

struct CouplingConfig {
  SimConfig sim{};
  GridSpec grid{2, 160, 5.0};
  /// Spacing of stored PDE snapshots used for drift interpolation in time.
  double field_store_interval = 0.01;
  /// Fixed PDE step, 0 for adaptive.
  double pde_dt = 0.0;

  /// Every violated constraint, including those of `sim`.
  std::vector<std::string> violations() const;
  void validate() const;
};

/// Solves the PDE in the given mode and wraps it as a drift series.
DriftFieldSeries solve_drift_fields(const CouplingConfig& config, PdeMode mode);

/// Runs a field-driven system (the intermediate one for mollified fields, the
/// limit one for limit fields) from `initial`, with noise keyed exactly as in
/// the interacting system.
Trajectories simulate_field_driven(const CouplingConfig& config, const DriftFieldSeries& fields,
                                   const ParticleEnsemble& initial, std::uint64_t replication);

Trajectories simulate_intermediate(const CouplingConfig& config, const DriftFieldSeries& fields,
                                   std::uint64_t replication = 0);
Trajectories simulate_limit(const CouplingConfig& config, const DriftFieldSeries& fields,
                            std::uint64_t replication = 0);

/// The three systems of one replication, advanced in lockstep from the same
/// initial sample with the same Brownian increments.
struct CoupledRun {
  std::uint64_t replication = 0;
  Trajectories interacting;
  Trajectories intermediate;
  Trajectories limit;
  /// Set when a field-driven particle left the grid; trajectories are then partial.
  bool aborted = false;
  std::string abort_reason;
};

struct CoupledSystems {
  bool interacting = true;
  bool intermediate = true;
  bool limit = true;
};

/// Empty series skip their system. `fields_*` must cover [0, horizon].
CoupledRun coupled_run(const CouplingConfig& config, const DriftFieldSeries& intermediate_fields,
                       const DriftFieldSeries& limit_fields, std::uint64_t replication,
                       CoupledSystems systems = {});

enum class ErrorAggregation { kMaxThenMean, kMeanSquare };

std::string to_string(ErrorAggregation a);

/// Monte Carlo estimates over replications of E[max_i |A - B|^2] or
/// E[mean_i |A - B|^2] at every stored time.
struct ErrorReport {
  ErrorAggregation metric = ErrorAggregation::kMaxThenMean;
  std::vector<double> times;
  std::vector<double> estimate;
  std::vector<double> standard_error;
  /// Raw per-replication values, [time][replication].
  std::vector<std::vector<double>> samples;
  /// Largest estimate over time and its standard error.
  double sup_estimate = 0.0;
  double sup_standard_error = 0.0;

  std::size_t particles = 0;
  double eps_k = 0.0;
  double eps_p = 0.0;
  double lambda = 0.0;
  double sigma = 0.0;
  std::size_t replications = 0;
};

/// Throws InvalidArgument when A and B differ in shape.
ErrorReport trajectory_error(std::span<const Trajectories> a, std::span<const Trajectories> b,
                             ErrorAggregation metric);

}  // namespace kslab
