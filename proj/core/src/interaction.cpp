#include "kslab/interaction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kslab/error.hpp"

namespace kslab {

InteractionModel::InteractionModel(int dimension, double m, const KernelParams& params,
                                   DriftSwitches switches)
    : dim_(dimension),
      params_(params),
      switches_(switches),
      coulomb_(dimension, params.eps_k),
      pressure_(m, params.lambda) {
  if (dimension != 2 && dimension != 3) {
    throw InvalidArgument("particle dynamics support dimension 2 or 3");
  }
  if (!(params.eps_p > 0.0)) throw InvalidArgument("eps_p must be positive");
}

double InteractionModel::max_density() const noexcept {
  return mollifier().radial(0.0, params_.eps_p);
}

double InteractionModel::stability_cap() const {
  const int d = dim_;
  double cap = std::numeric_limits<double>::infinity();
  if (switches_.repulsion) {
    const double eps_p = params_.eps_p;
    const double lo = 2.0 * params_.lambda;
    const double hi = max_density();
    const double p2 = hi > lo ? pressure_.sup_abs_derivative(lo, hi, 2) : 0.0;
    const double g = mollifier().sup_gradient();
    cap = std::min(cap, std::pow(eps_p, d + 2) / (1.0 + p2 * g * g / (eps_p * eps_p)));
  }
  if (switches_.aggregation) cap = std::min(cap, std::pow(params_.eps_k, d));
  return 0.1 * cap;
}

}  // namespace kslab
