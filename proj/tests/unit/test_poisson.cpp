#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "kslab/error.hpp"
#include "kslab/initial_datum.hpp"
#include "kslab/kernels.hpp"
#include "kslab/poisson.hpp"
#include "oracles.hpp"

using namespace kslab;

TEST(Poisson, ZeroSourceGivesZeroField) {
  const GridField zero(GridSpec{2, 32, 2.0});
  const auto sol = poisson_free_space(zero);
  for (double v : sol.potential.values) EXPECT_EQ(v, 0.0);
  for (const auto& g : sol.gradient)
    for (double v : g.values) EXPECT_EQ(v, 0.0);
}

TEST(Poisson, OddResolutionRejected) {
  const GridField odd(GridSpec{2, 33, 2.0});
  EXPECT_THROW(poisson_free_space(odd), ConfigError);
  EXPECT_THROW(FreeSpaceConvolver(GridSpec{3, 15, 1.0}), ConfigError);
}

TEST(Poisson, GaussianPotentialIn3d) {
  const double s = 0.5;
  InitialDatum datum;
  datum.scale = s;
  // Point samples; cell averages would add their own O(h^2) smoothing.
  const GridSpec g{3, 96, 3.0};
  GridField u(g);
  std::vector<std::size_t> at(3);
  for (std::size_t c = 0; c < g.cells(); ++c) {
    g.unravel(c, at);
    const std::vector<double> x{g.center(at[0]), g.center(at[1]), g.center(at[2])};
    u.values[c] = datum.density(x);
  }
  const auto sol = poisson_free_space(u);
  // 50 cells along the diagonal-ish ray j = (n/2 + k, n/2 + k/2, n/2).
  std::vector<std::size_t> idx(3);
  int checked = 0;
  for (std::size_t k = 0; k < 50; ++k) {
    const std::size_t i0 = 48 + k / 2, i1 = 48 + k / 3, i2 = 48 + (k % 7) / 2;
    const double x = g.center(i0), y = g.center(i1), z = g.center(i2);
    const double r = std::sqrt(x * x + y * y + z * z);
    const double expect = oracle::gaussian_potential_3d(s, r);
    const double got = sol.potential.values[(i0 * 96 + i1) * 96 + i2];
    EXPECT_NEAR(got, expect, 1e-3 * expect) << "r=" << r;
    ++checked;
  }
  EXPECT_EQ(checked, 50);
}

TEST(Poisson, BumpFarFieldIsPointMassPotential) {
  for (int d = 2; d <= 3; ++d) {
    InitialDatum datum;
    datum.kind = InitialDatum::Kind::kBump;
    datum.scale = 0.5;
    const std::size_t n = d == 2 ? 128 : 64;
    const GridSpec g{d, n, 4.0};
    const auto u = discretize(datum, g);
    const auto sol = poisson_free_space(u);
    const CoulombKernel phi(d);
    // Cell whose first coordinate is nearest L/2, others nearest 0.
    const std::size_t j = n / 2 + n / 4;
    std::size_t flat = 0;
    std::vector<double> x(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) {
      const std::size_t ia = a == 0 ? j : n / 2;
      flat += ia * g.stride(a);
      x[static_cast<std::size_t>(a)] = g.center(ia);
    }
    const double expect = phi.phi(x);
    EXPECT_NEAR(sol.potential.values[flat], expect, 1e-2 * std::abs(expect)) << "d=" << d;
  }
}

TEST(Poisson, GradientIsConsistentWithPotential) {
  InitialDatum datum;
  datum.scale = 0.4;
  const GridSpec g{2, 128, 3.0};
  const auto sol = poisson_free_space(discretize(datum, g));
  const double h = g.spacing();
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 10; i < 118; i += 7) {
    for (std::size_t k = 10; k < 118; k += 5) {
      const std::size_t c = i * 128 + k;
      const double fd = (sol.potential.values[c + 1] - sol.potential.values[c - 1]) / (2 * h);
      worst = std::max(worst, std::abs(fd - sol.gradient[1].values[c]));
      scale = std::max(scale, std::abs(fd));
    }
  }
  EXPECT_LT(worst, 1e-2 * scale);
}

TEST(Poisson, OriginAverageAndMollifiedProfile) {
  // Mean of -ln(r)/(2 pi) over the unit square [-1/2, 1/2]^2, by 2D quadrature.
  const double avg = 4.0 * oracle::integrate(
                               [](double x) {
                                 return oracle::integrate(
                                     [x](double y) {
                                       return -std::log(std::hypot(x, y)) / (2 * std::numbers::pi);
                                     },
                                     0.0, 0.5);
                               },
                               0.0, 0.5);
  EXPECT_NEAR(green_origin_average(2, 1.0), avg, 1e-10);
  // h scaling in d = 2 is additive: mean over an h-cell = mean over unit cell - ln(h)/(2 pi).
  EXPECT_NEAR(green_origin_average(2, 0.1), avg - std::log(0.1) / (2 * std::numbers::pi), 1e-10);

  for (int d = 2; d <= 3; ++d) {
    const CoulombKernel phi(d);
    const double eps = 0.3;
    EXPECT_NEAR(mollified_potential_radial(d, eps, 0.45), phi.phi_radial(0.45), 1e-14);
    // Derivative of the profile is the shell-theorem gradient.
    const MollifiedCoulomb k(d, eps);
    for (double r : {0.05, 0.15, 0.25}) {
      const double hh = 1e-5;
      const double fd =
          (mollified_potential_radial(d, eps, r + hh) - mollified_potential_radial(d, eps, r - hh)) / (2 * hh);
      EXPECT_NEAR(fd, k.gradient_factor(r * r) * r, 1e-7 * std::max(1.0, std::abs(fd)));
    }
  }
}
