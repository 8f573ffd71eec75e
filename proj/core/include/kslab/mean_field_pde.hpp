#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "kslab/grid.hpp"
#include "kslab/interaction.hpp"
#include "kslab/poisson.hpp"

namespace kslab {

/// kMollified: c = Phi^{eps_k} * u, pi = p_lambda(V^{eps_p} * u).
/// kLimit:     c = Phi * u,         pi = p(u).
enum class PdeMode { kMollified, kLimit };

struct PdeParams {
  double m = 2.0;
  double sigma = 0.5;
  KernelParams kernel{};
  DriftSwitches drifts{};
  GridSpec grid{};
  PdeMode mode = PdeMode::kMollified;
};

/// Chemical potential, pressure and the density the pressure acts on, all on the grid.
struct PdePotentials {
  std::vector<double> chemical;  // c (zero when aggregation is off)
  std::vector<double> density;   // V^{eps_p} * u or u itself
  std::vector<double> pressure;  // pi (zero when repulsion is off)
};

/// Right-hand side of the conservative finite-volume scheme
///   d_t u = -div F,  F = -sigma grad u + u grad c - u grad pi,
/// with face velocities from differences of c and pi, MUSCL/minmod upwinding
/// of u and zero flux through the box boundary.
class MeanFieldOperator {
 public:
  /// Throws ConfigError on invalid parameters (odd resolution, bad m, ...).
  explicit MeanFieldOperator(const PdeParams& params);
  ~MeanFieldOperator();
  MeanFieldOperator(MeanFieldOperator&&) noexcept;
  MeanFieldOperator& operator=(MeanFieldOperator&&) noexcept;

  const PdeParams& params() const noexcept { return params_; }

  PdePotentials potentials(std::span<const double> u) const;

  /// Writes the rhs into `out` and returns the largest stable explicit step
  /// for the state u (see pde_solve).
  double rhs(std::span<const double> u, std::span<double> out) const;

  /// Slope of the pressure law applied to the density field.
  double pressure_slope(double density) const;

  /// grad c on the grid, one field per axis, by the gradient kernel convolution.
  std::vector<std::vector<double>> chemical_gradient(std::span<const double> u) const;

 private:
  PdeParams params_;
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

GridField pde_rhs(const GridField& u, const PdeParams& params);

struct PdeSolveOptions {
  double horizon = 0.0;
  /// Times to store, within [0, horizon]; empty stores {0, horizon}.
  std::vector<double> output_times;
  /// Fixed step; 0 picks an adaptive step from the stability estimate.
  double dt = 0.0;
};

struct PdeSolution {
  std::vector<GridField> snapshots;
  std::size_t steps = 0;
  /// max over all steps of |mass(t) - mass(0)| / mass(0).
  double max_mass_drift = 0.0;
  /// min over all steps of min u.
  double min_value = 0.0;
};

/// SSP-RK2 time integration. The step is limited by
///   dt <= 0.4 / (sum_a 2 max|v_a|/h + 2 d sigma/h^2 + 2 d max(u) max(pi')/h^2),
/// which keeps each Euler stage positive. A fixed dt above the limit throws
/// StepSizeError carrying the suggested dt.
PdeSolution pde_solve(const PdeParams& params, const GridField& initial,
                      const PdeSolveOptions& options);

}  // namespace kslab
