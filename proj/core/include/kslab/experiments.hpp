#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kslab/coupling.hpp"
#include "kslab/fit.hpp"
#include "kslab/grid.hpp"

namespace kslab {

/// Cutoff parameters under logarithmic scaling:
///   eps_k = (alpha_k ln N)^{-1/d},  eps_p = (alpha_p ln N)^{-1/(dm-d+2)},  lambda = eps_p^d / 2.
struct ScalingPlan {
  double particles = 0.0;
  double alpha_k = 0.0;
  double alpha_p = 0.0;
  int dimension = 2;
  double m = 2.0;
  double eps_k = 0.0;
  double eps_p = 0.0;
  double lambda = 0.0;
  /// Set when eps_p^d/2 >= 1/4, i.e. the cutoff bands would overlap.
  bool band_warning = false;

  /// Admissibility inputs, NaN when not supplied.
  double beta = 0.0;
  double delta = 0.0;
  bool has_admissibility = false;
  /// 1 - delta (2dm - 2d + 2)/(dm - d + 2) - beta; meaningful only with has_admissibility.
  double admissibility_margin = 0.0;
};

/// Throws ConfigError for N < 3, nonpositive alphas, invalid m or d < 2.
ScalingPlan plan_parameters(double particles, double alpha_k, double alpha_p, int dimension,
                            double m);
ScalingPlan plan_parameters(double particles, double alpha_k, double alpha_p, int dimension,
                            double m, double beta, double delta);

struct RatePoint {
  double x = 0.0;
  double y = 0.0;
  double standard_error = 0.0;
};

/// Weighted least squares of ln y on ln x with weights (y / stderr)^2, or
/// unweighted when any stderr is zero. Needs >= 3 points with x, y > 0.
LineFit rate_fit(std::span<const RatePoint> points);

struct StudyResult {
  std::vector<RatePoint> points;
  std::vector<ErrorReport> reports;
  LineFit fit;
  /// Replications dropped because a field-driven particle left the grid.
  std::size_t aborted = 0;
};

/// E max_i |X^{N,i} - Xbar^i|^2 (sup over stored times) for each N at fixed
/// cutoffs, fitted against N. The mollified PDE is solved once.
StudyResult fluctuation_study(const CouplingConfig& base, std::span<const std::size_t> particle_counts,
                              int workers = 1);

/// sup_t E|Xbar - Xhat|^2 for eps_k = eps_p = eps over eps_list (lambda = eps^d/2),
/// fitted against eps_k + eps_p.
StudyResult meanfield_rate_study(const CouplingConfig& base, std::span<const double> eps_list,
                                 int workers = 1);

struct MarginalReport {
  /// Sliced W1 of the pooled particle positions of the first replication.
  double w1_pooled = 0.0;
  /// Same metric for particle 1 and particle 2 across replications.
  double w1_particle1 = 0.0;
  double w1_particle2 = 0.0;
  /// max |corr(x1_a, x2_b)| over coordinate pairs across replications.
  double independence = 0.0;
  /// Sliced W1 of i.i.d. draws from the reference, as many as in w1_pooled.
  double baseline = 0.0;
  std::size_t replications = 0;
  std::size_t directions = 0;
};

/// Propagation-of-chaos battery against a reference density. Requires a
/// reference of unit mass (to 1e-6) and ensembles with N >= 2.
MarginalReport marginal_metrics(std::span<const ParticleEnsemble> ensembles,
                                const GridField& reference, std::uint64_t seed,
                                std::size_t directions = 64);

/// max over coordinate pairs of |Pearson correlation| between a's and b's coordinates.
double independence_statistic(std::span<const double> a, std::span<const double> b, int dimension);

}  // namespace kslab
