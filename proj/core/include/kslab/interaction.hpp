#pragma once

#include "kslab/kernels.hpp"
#include "kslab/nonlinearity.hpp"

namespace kslab {

/// Regularization widths: eps_k for aggregation, eps_p for the pressure density.
struct KernelParams {
  double eps_k = 0.5;
  double eps_p = 0.5;
  double lambda = 0.125;
};

struct DriftSwitches {
  bool aggregation = true;
  bool repulsion = true;
};

/// Everything the interacting drift needs: mollified Coulomb kernel at eps_k,
/// mollifier at eps_p and the cutoff pressure. Immutable once built.
class InteractionModel {
 public:
  /// Requires dimension 2 or 3. Throws InvalidArgument on invalid parameters.
  InteractionModel(int dimension, double m, const KernelParams& params,
                   DriftSwitches switches = {});

  int dimension() const noexcept { return dim_; }
  double m() const noexcept { return pressure_.m(); }
  const KernelParams& params() const noexcept { return params_; }
  const DriftSwitches& switches() const noexcept { return switches_; }

  const MollifiedCoulomb& coulomb() const noexcept { return coulomb_; }
  const Mollifier& mollifier() const noexcept { return coulomb_.mollifier(); }
  const CutoffPressure& pressure() const noexcept { return pressure_; }

  /// V^{eps_p}(0), the largest value the mollified empirical density can take.
  double max_density() const noexcept;

  /// Euler-Maruyama step cap
  ///   0.1 * min(eps_p^{d+2} / (1 + P2 * |grad V|^2 * eps_p^-2), eps_k^d),
  /// where P2 = sup |p_lambda''| over the uncut range [2 lambda, V^{eps_p}(0)].
  /// Terms of disabled drifts drop out; infinity when both are off.
  double stability_cap() const;

 private:
  int dim_;
  KernelParams params_;
  DriftSwitches switches_;
  MollifiedCoulomb coulomb_;
  CutoffPressure pressure_;
};

}  // namespace kslab
