#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "kslab/error.hpp"
#include "kslab/nonlinearity.hpp"

using namespace kslab;

TEST(Pressure, ClosedForm) {
  EXPECT_DOUBLE_EQ(p_eval(1.0, 2.0), 2.0);
  EXPECT_DOUBLE_EQ(p_eval(2.0, 3.0), 6.0);
  EXPECT_EQ(p_eval(0.0, 2.0), 0.0);
  EXPECT_EQ(p_eval(0.0, 4.5), 0.0);
  EXPECT_THROW(p_eval(1.0, 1.0), InvalidArgument);
  EXPECT_THROW(p_eval(1.0, 0.5), InvalidArgument);
}

TEST(Pressure, DerivativesMatchFiniteDifferences) {
  for (double m : {2.0, 3.0, 4.5}) {
    for (double u : {0.3, 1.0, 2.7}) {
      for (int k = 1; k <= 3; ++k) {
        const double h = 1e-5;
        const double fd = (p_derivative(u + h, m, k - 1) - p_derivative(u - h, m, k - 1)) / (2 * h);
        EXPECT_NEAR(p_derivative(u, m, k), fd, 1e-6 * std::max(1.0, std::abs(fd)));
      }
    }
  }
}

TEST(CutoffPressure, PlateauAndMiddleValues) {
  const CutoffPressure cp(2.0, 0.01);
  EXPECT_DOUBLE_EQ(cp.value(0.005), 0.02);
  EXPECT_DOUBLE_EQ(cp.value(0.5), 1.0);
  EXPECT_DOUBLE_EQ(cp.value(300.0), 400.0);
  EXPECT_EQ(cp.first(0.005), 0.0);
  EXPECT_EQ(cp.first(300.0), 0.0);
  EXPECT_DOUBLE_EQ(cp.first(0.5), 2.0);
  EXPECT_EQ(cp.second(0.5), 0.0);
  EXPECT_EQ(cp.second(0.005), 0.0);
}

TEST(CutoffPressure, RejectsInvalidParameters) {
  EXPECT_THROW(CutoffPressure(2.5, 0.01), InvalidArgument);
  EXPECT_THROW(CutoffPressure(1.0, 0.01), InvalidArgument);
  EXPECT_THROW(CutoffPressure(2.0, 0.5), InvalidArgument);
  EXPECT_THROW(CutoffPressure(2.0, 0.0), InvalidArgument);
  EXPECT_NO_THROW(CutoffPressure(3.0, 0.25));
}

TEST(CutoffPressure, CoincidesWithPressureInMiddle) {
  std::mt19937_64 rng(17);
  for (double m : {2.0, 3.0, 4.0}) {
    const double lambda = 0.05;
    const CutoffPressure cp(m, lambda);
    std::uniform_real_distribution<double> u(2 * lambda, 1 / lambda);
    for (int k = 0; k < 1000; ++k) {
      const double r = u(rng);
      EXPECT_EQ(cp.value(r), p_eval(r, m));
    }
  }
}

class CutoffPressureSweep : public ::testing::TestWithParam<std::tuple<double, double>> {};

TEST_P(CutoffPressureSweep, C3AtBandEdges) {
  const auto [m, lambda] = GetParam();
  const CutoffPressure cp(m, lambda);
  for (double edge : {lambda, 2 * lambda, 1 / lambda, 2 / lambda}) {
    const double band_lo = edge < 1.0 ? lambda : 1 / lambda;
    for (int k = 0; k <= 3; ++k) {
      const double h = 1e-9 * edge;
      const double lo = cp.derivative(edge - h, k);
      const double hi = cp.derivative(edge + h, k);
      // Relative to the size of this derivative across the band.
      const double scale = std::max(1.0, cp.sup_abs_derivative(band_lo, 2 * band_lo, k));
      EXPECT_NEAR(lo, hi, 1e-6 * scale)
          << "edge=" << edge << " k=" << k;
    }
  }
}

TEST_P(CutoffPressureSweep, DerivativesMatchFiniteDifferencesInBands) {
  const auto [m, lambda] = GetParam();
  const CutoffPressure cp(m, lambda);
  for (double start : {lambda, 1 / lambda}) {
    for (int j = 1; j < 10; ++j) {
      const double r = start * (1.0 + j / 10.0);
      for (int k = 1; k <= 3; ++k) {
        const double h = 1e-6 * r;
        const double fd = (cp.derivative(r + h, k - 1) - cp.derivative(r - h, k - 1)) / (2 * h);
        EXPECT_NEAR(cp.derivative(r, k), fd, 1e-5 * std::max(1.0, std::abs(fd)));
      }
    }
  }
}

TEST_P(CutoffPressureSweep, MonotoneAndLipschitz) {
  const auto [m, lambda] = GetParam();
  const CutoffPressure cp(m, lambda);
  const double lo = 0.5 * lambda, hi = 2.5 / lambda;
  double prev = cp.value(lo);
  double sup_slope = 0.0;
  const int n = 200000;
  for (int k = 1; k <= n; ++k) {
    const double r = lo * std::pow(hi / lo, static_cast<double>(k) / n);
    const double v = cp.value(r);
    EXPECT_GE(v, prev);
    EXPECT_GE(cp.first(r), -1e-12);
    sup_slope = std::max(sup_slope, cp.first(r));
    prev = v;
  }
  const double p_slope_max = std::max(m * std::pow(lambda, m - 2), m * std::pow(2 / lambda, m - 2));
  EXPECT_LE(sup_slope, p_slope_max * 2.1);
}

INSTANTIATE_TEST_SUITE_P(Admissible, CutoffPressureSweep,
                         ::testing::Values(std::make_tuple(2.0, 0.01), std::make_tuple(2.0, 0.125),
                                           std::make_tuple(3.0, 0.05), std::make_tuple(3.0, 0.25),
                                           std::make_tuple(4.0, 0.1)));
