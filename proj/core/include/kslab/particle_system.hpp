#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kslab/ensemble.hpp"
#include "kslab/initial_datum.hpp"
#include "kslab/interaction.hpp"
#include "kslab/noise.hpp"

namespace kslab {

enum class DriftMethod { kDirect, kCellList };

/// Parameters of one interacting-particle simulation.
struct SimConfig {
  int dimension = 2;
  double m = 2.0;
  std::size_t particles = 256;
  double sigma = 0.5;
  double horizon = 0.3;
  double dt = 5e-3;
  KernelParams kernel{};
  InitialDatum initial{};
  std::uint64_t seed = 1;
  std::size_t replications = 1;
  /// Snapshot times in [0, horizon]; empty means {0, horizon}.
  std::vector<double> output_times;
  DriftSwitches drifts{};
  DriftMethod method = DriftMethod::kDirect;
  /// Cell width for the cell-list path; 0 selects eps_p.
  double cell_width = 0.0;
  int workers = 1;

  /// Every violated constraint, not just the first. Empty when valid.
  std::vector<std::string> violations(bool check_stability_cap = true) const;
  /// Throws ConfigError listing all violations.
  void validate(bool check_stability_cap = true) const;

  /// Number of Euler-Maruyama steps and the step size actually used:
  /// steps = ceil(horizon/dt), effective dt = horizon/steps (never above dt).
  std::size_t steps() const;
  double effective_dt() const;
  /// Step index of each output time, ascending and deduplicated.
  std::vector<std::size_t> output_steps() const;
};

/// (1/N) sum_j grad Phi^{eps_k}(x_i - x_j).
std::vector<double> aggregation_drift(const ParticleEnsemble& ensemble, std::size_t i,
                                      const InteractionModel& model);

/// (1/N) sum_j V^{eps_p}(x_i - x_j), including the self term.
double mollified_empirical_density(const ParticleEnsemble& ensemble, std::size_t i,
                                   const InteractionModel& model);

/// -p_lambda'(rho_i) (1/N) sum_j grad V^{eps_p}(x_i - x_j).
std::vector<double> repulsion_drift(const ParticleEnsemble& ensemble, std::size_t i,
                                    const InteractionModel& model);

/// Total drift of every particle by direct O(N^2) sums. `out` has N*d entries.
void drift_all_direct(const ParticleEnsemble& ensemble, const InteractionModel& model,
                      std::span<double> out, int workers = 1);

/// Aggregation by the direct loop (its kernel has global support) plus the
/// V^{eps_p} sums through a uniform cell list. Throws ConfigError if
/// cell_width < eps_p.
void drift_all_celllist(const ParticleEnsemble& ensemble, const InteractionModel& model,
                        double cell_width, std::span<double> out, int workers = 1);

/// Repulsion-only sums, exposed for equivalence checks and benchmarking.
/// `density` has N entries, `gradient` has N*d: (1/N) sum_j V and grad V terms.
void repulsion_sums_direct(const ParticleEnsemble& ensemble, const InteractionModel& model,
                           std::span<double> density, std::span<double> gradient,
                           int workers = 1);
void repulsion_sums_celllist(const ParticleEnsemble& ensemble, const InteractionModel& model,
                             double cell_width, std::span<double> density,
                             std::span<double> gradient, int workers = 1);

/// Advances the ensemble by one Euler-Maruyama step with all drifts frozen at
/// the step start. Noise for particle i is keyed by (replication, id_i, step).
/// Throws BlowUpError naming the first particle with a non-finite coordinate.
class EulerMaruyamaStepper {
 public:
  EulerMaruyamaStepper(const InteractionModel& model, double sigma, const NoiseStream& noise,
                       DriftMethod method = DriftMethod::kDirect, double cell_width = 0.0,
                       int workers = 1);

  void step(ParticleEnsemble& ensemble, double dt, std::uint64_t replication,
            std::uint64_t step_index);

 private:
  const InteractionModel& model_;
  double sigma_;
  const NoiseStream& noise_;
  DriftMethod method_;
  double cell_width_;
  int workers_;
  std::vector<double> drift_;
};

ParticleEnsemble em_step(const ParticleEnsemble& ensemble, const InteractionModel& model,
                         double dt, double sigma, const NoiseStream& noise,
                         std::uint64_t replication, std::uint64_t step_index);

/// Runs one replication: samples the initial ensemble, then steps to the
/// horizon, returning snapshots at the configured output times.
std::vector<ParticleEnsemble> simulate(const SimConfig& config, std::uint64_t replication = 0);

}  // namespace kslab
