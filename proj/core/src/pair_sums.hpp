#pragma once

// Inner interaction loops shared by the per-particle, direct and cell-list paths.

#include <cmath>
#include <cstddef>

#include "kslab/interaction.hpp"
#include "kslab/kernels.hpp"

namespace kslab::detail {

struct PairConstants {
  double eps_k2;
  double inv_eps_k;
  double inv_eps_k_d;
  double inv_area;
  const Mollifier* kernel_mollifier;
  double eps_p2;
  double inv_eps_p2;
  // rho = density_scale * sum exp(-1/w); grad rho = gradient_scale * sum exp(-1/w)/w^2 dx
  double density_scale;
  double gradient_scale;

  static PairConstants from(const InteractionModel& model, std::size_t n) {
    const int d = model.dimension();
    const double eps_k = model.params().eps_k;
    const double eps_p = model.params().eps_p;
    const double inv_n = 1.0 / static_cast<double>(n);
    const double cv = model.mollifier().normalization() / std::pow(eps_p, d);
    return {eps_k * eps_k,
            1.0 / eps_k,
            1.0 / std::pow(eps_k, d),
            1.0 / unit_sphere_area(d),
            &model.mollifier(),
            eps_p * eps_p,
            1.0 / (eps_p * eps_p),
            cv * inv_n,
            -2.0 * cv / (eps_p * eps_p) * inv_n};
  }
};

/// Raw sums over the key-ordered block `others` (n points, row-major D).
/// agg accumulates M-weighted Coulomb terms without the -1/|S| factor.
template <int D, bool Agg, bool Rep>
inline void pair_sums(const double* xi, const double* others, std::size_t n,
                      const PairConstants& c, double* agg, double& rho, double* grad) noexcept {
  for (std::size_t k = 0; k < n; ++k) {
    const double* xk = others + k * D;
    double dx[D];
    double r2 = 0.0;
    for (int a = 0; a < D; ++a) {
      dx[a] = xi[a] - xk[a];
      r2 += dx[a] * dx[a];
    }
    if constexpr (Agg) {
      double f;
      if (r2 >= c.eps_k2) {
        if constexpr (D == 2) {
          f = 1.0 / r2;
        } else {
          f = 1.0 / (r2 * std::sqrt(r2));
        }
      } else {
        f = c.inv_eps_k_d * c.kernel_mollifier->mass_ratio(std::sqrt(r2) * c.inv_eps_k);
      }
      for (int a = 0; a < D; ++a) agg[a] += f * dx[a];
    }
    if constexpr (Rep) {
      if (r2 < c.eps_p2) {
        const double w = 1.0 - r2 * c.inv_eps_p2;
        const double e = std::exp(-1.0 / w);
        rho += e;
        const double g = e / (w * w);
        for (int a = 0; a < D; ++a) grad[a] += g * dx[a];
      }
    }
  }
}

}  // namespace kslab::detail
