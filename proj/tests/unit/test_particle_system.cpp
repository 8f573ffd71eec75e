#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "kslab/error.hpp"
#include "kslab/initial_datum.hpp"
#include "kslab/particle_system.hpp"

using namespace kslab;

namespace {

ParticleEnsemble random_ensemble(int d, std::size_t n, double spread, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-spread, spread);
  std::vector<double> pos(n * static_cast<std::size_t>(d));
  for (auto& v : pos) v = u(rng);
  return ParticleEnsemble(d, std::move(pos));
}

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

TEST(AggregationDrift, SingleParticleIsZero) {
  const InteractionModel model(2, 2.0, {0.3, 0.5, 0.1});
  const ParticleEnsemble e(2, std::vector<double>{0.2, -0.7});
  const auto g = aggregation_drift(e, 0, model);
  EXPECT_EQ(g, (std::vector<double>{0.0, 0.0}));
}

TEST(AggregationDrift, FarPairIsHalfCoulombGradient) {
  for (int d = 2; d <= 3; ++d) {
    const InteractionModel model(d, 2.0, {0.2, 0.5, 0.1});
    std::vector<double> pos(2 * static_cast<std::size_t>(d), 0.0);
    pos[0] = 0.4;
    pos[static_cast<std::size_t>(d)] = -0.3;
    pos[static_cast<std::size_t>(d) + 1] = 0.25;
    const ParticleEnsemble e(d, pos);
    std::vector<double> diff(static_cast<std::size_t>(d)), expect(diff.size());
    for (std::size_t a = 0; a < diff.size(); ++a) diff[a] = pos[a] - pos[diff.size() + a];
    CoulombKernel(d).grad(diff, expect);
    const auto g = aggregation_drift(e, 0, model);
    for (std::size_t a = 0; a < diff.size(); ++a) EXPECT_NEAR(g[a], 0.5 * expect[a], 1e-15);
  }
}

TEST(AggregationDrift, TranslationInvariantAndBounded) {
  const InteractionModel model(3, 2.0, {0.15, 0.5, 0.1});
  auto e = random_ensemble(3, 40, 0.5, 3);
  std::vector<std::vector<double>> before;
  for (std::size_t i = 0; i < e.size(); ++i) before.push_back(aggregation_drift(e, i, model));
  // Binary-exact shift so differences are unchanged bit for bit.
  for (double& v : e.positions()) v += 4.0;
  double sup = 0.0;
  for (int j = 1; j <= 20000; ++j) sup = std::max(sup, model.coulomb().gradient_norm(2 * 0.15 * j / 20000.0));
  for (std::size_t i = 0; i < e.size(); ++i) {
    const auto g = aggregation_drift(e, i, model);
    for (std::size_t a = 0; a < 3; ++a) EXPECT_NEAR(g[a], before[i][a], 1e-12);
    EXPECT_LE(norm(g), sup * (1 + 1e-9));
  }
}

TEST(EmpiricalDensity, Examples) {
  const double eps = 0.5;
  const InteractionModel model(2, 2.0, {0.5, eps, 0.1});
  const double v0 = model.max_density();
  EXPECT_NEAR(v0, shared_mollifier(2).radial(0.0, eps), 1e-15);

  const ParticleEnsemble apart(2, std::vector<double>{0.0, 0.0, 1.0, 0.0, 0.0, 2.0});
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(mollified_empirical_density(apart, i, model), v0 / 3, 1e-15);

  const ParticleEnsemble stacked(2, std::vector<double>{0.3, 0.3, 0.3, 0.3, 0.3, 0.3, 0.3, 0.3});
  EXPECT_NEAR(mollified_empirical_density(stacked, 2, model), v0, 1e-13);

  const ParticleEnsemble pair(2, std::vector<double>{0.0, 0.0, 0.0, eps / 2});
  const double direct = 0.5 * (v0 + shared_mollifier(2).radial(eps / 2, eps));
  EXPECT_NEAR(mollified_empirical_density(pair, 0, model), direct, 1e-14);
}

TEST(RepulsionDrift, IsolatedAndLowDensityGiveZero) {
  const InteractionModel model(2, 2.0, {0.5, 0.5, 0.125});
  const ParticleEnsemble apart(2, std::vector<double>{0.0, 0.0, 1.0, 0.0});
  EXPECT_EQ(repulsion_drift(apart, 0, model), (std::vector<double>{0.0, 0.0}));
  // Density below lambda: a pair near the support edge of many particles.
  const ParticleEnsemble sparse = random_ensemble(2, 400, 50.0, 1);
  for (std::size_t i = 0; i < 10; ++i) {
    ASSERT_LT(mollified_empirical_density(sparse, i, model), 0.125);
    EXPECT_EQ(repulsion_drift(sparse, i, model), (std::vector<double>{0.0, 0.0}));
  }
}

TEST(RepulsionDrift, MatchesFiniteDifferenceOfComposedMap) {
  // -p_lambda'(rho_i) grad_i rho_i is the gradient of x_i -> -p_lambda(rho_i(x_i)).
  for (int d = 2; d <= 3; ++d) {
    const InteractionModel model(d, 2.0, {0.5, 0.5, d == 2 ? 0.125 : 0.0625});
    auto e = random_ensemble(d, 12, 0.3, 7 + d);
    for (std::size_t i = 0; i < 4; ++i) {
      const auto got = repulsion_drift(e, i, model);
      for (std::size_t a = 0; a < static_cast<std::size_t>(d); ++a) {
        const double h = 1e-6;
        auto ep = e, em = e;
        ep.position(i)[a] += h;
        em.position(i)[a] -= h;
        const double fp = model.pressure().value(mollified_empirical_density(ep, i, model));
        const double fm = model.pressure().value(mollified_empirical_density(em, i, model));
        const double fd = -(fp - fm) / (2 * h);
        EXPECT_NEAR(got[a], fd, 1e-6 * std::max(1.0, std::abs(fd)));
      }
    }
  }
}

TEST(DriftAll, DirectEqualsPerParticleSum) {
  const InteractionModel model(2, 3.0, {0.2, 0.4, 0.05});
  const auto e = random_ensemble(2, 60, 0.4, 11);
  std::vector<double> out(120);
  drift_all_direct(e, model, out);
  for (std::size_t i = 0; i < e.size(); ++i) {
    const auto a = aggregation_drift(e, i, model);
    const auto r = repulsion_drift(e, i, model);
    for (std::size_t k = 0; k < 2; ++k) EXPECT_NEAR(out[2 * i + k], a[k] + r[k], 1e-12 * (1 + std::abs(a[k] + r[k])));
  }
}

TEST(DriftAll, GradientSumAntisymmetry) {
  const InteractionModel model(3, 2.0, {0.3, 0.4, 0.03});
  const auto e = random_ensemble(3, 200, 0.5, 13);
  std::vector<double> rho(200), grad(600);
  repulsion_sums_direct(e, model, rho, grad);
  double total[3] = {0, 0, 0}, scale = 0.0;
  for (std::size_t i = 0; i < 200; ++i)
    for (std::size_t a = 0; a < 3; ++a) {
      total[a] += grad[3 * i + a];
      scale = std::max(scale, std::abs(grad[3 * i + a]));
    }
  for (double t : total) EXPECT_LE(std::abs(t), 1e-10 * std::max(1.0, scale));
}

TEST(DriftAll, WorkerCountDoesNotChangeBits) {
  const InteractionModel model(2, 2.0, {0.1, 0.2, 0.02});
  const auto e = random_ensemble(2, 300, 0.5, 17);
  std::vector<double> a(600), b(600), c(600), d(600);
  drift_all_direct(e, model, a, 1);
  drift_all_direct(e, model, b, 4);
  drift_all_celllist(e, model, 0.2, c, 1);
  drift_all_celllist(e, model, 0.2, d, 3);
  EXPECT_EQ(a, b);
  EXPECT_EQ(c, d);
}

TEST(CellList, MatchesDirectSums) {
  for (int d = 2; d <= 3; ++d) {
    const double eps_p = 0.1;
    const InteractionModel model(d, 2.0, {0.3, eps_p, std::pow(eps_p, d) / 2});
    const auto e = random_ensemble(d, 100, 0.3, 19 + d);
    const std::size_t nd = 100 * static_cast<std::size_t>(d);
    std::vector<double> r1(100), g1(nd), r2(100), g2(nd);
    repulsion_sums_direct(e, model, r1, g1);
    repulsion_sums_celllist(e, model, eps_p, r2, g2);
    for (std::size_t i = 0; i < 100; ++i) {
      EXPECT_LE(std::abs(r1[i] - r2[i]), 1e-12 * std::max(r1[i], 1e-300) + 1e-300);
      double diff = 0, ref = 0;
      for (std::size_t a = 0; a < static_cast<std::size_t>(d); ++a) {
        diff += std::pow(g1[i * d + a] - g2[i * d + a], 2);
        ref += std::pow(g1[i * d + a], 2);
      }
      EXPECT_LE(std::sqrt(diff), 1e-12 * std::sqrt(ref));
    }
    std::vector<double> full1(nd), full2(nd);
    drift_all_direct(e, model, full1);
    drift_all_celllist(e, model, eps_p, full2);
    for (std::size_t k = 0; k < nd; ++k) EXPECT_NEAR(full1[k], full2[k], 1e-12 * (1 + std::abs(full1[k])));
  }
}

TEST(CellList, SingleCellIsExactAndNarrowCellsRejected) {
  const InteractionModel model(2, 2.0, {0.3, 0.5, 0.1});
  const auto e = random_ensemble(2, 50, 0.2, 23);
  std::vector<double> r1(50), g1(100), r2(50), g2(100);
  repulsion_sums_direct(e, model, r1, g1);
  repulsion_sums_celllist(e, model, 10.0, r2, g2);
  EXPECT_EQ(r1, r2);
  EXPECT_EQ(g1, g2);
  std::vector<double> out(100);
  EXPECT_THROW(drift_all_celllist(e, model, 0.4, out), ConfigError);
}

TEST(EmStep, DeterministicCases) {
  const NoiseStream noise(1);
  const InteractionModel model(2, 2.0, {0.2, 0.3, 0.045});
  const ParticleEnsemble one(2, std::vector<double>{0.5, -0.25});
  EXPECT_EQ(em_step(one, model, 0.01, 0.0, noise, 0, 0).positions()[0], 0.5);
  EXPECT_EQ(em_step(one, model, 0.01, 0.0, noise, 0, 0).positions()[1], -0.25);

  // Far pair: only aggregation acts, x_i += dt/2 grad Phi(x_i - x_j).
  const ParticleEnsemble pair(2, std::vector<double>{0.0, 0.0, 1.0, 0.0});
  const double dt = 0.01;
  const auto next = em_step(pair, model, dt, 0.0, noise, 0, 0);
  const double pull = dt * 0.5 / (2 * std::numbers::pi);
  EXPECT_NEAR(next.position(0)[0], pull, 1e-16);
  EXPECT_NEAR(next.position(1)[0], 1.0 - pull, 1e-15);
  EXPECT_EQ(next.position(0)[1], 0.0);
  EXPECT_DOUBLE_EQ(next.time(), dt);
}

TEST(EmStep, NoiseReplaysByKey) {
  const NoiseStream noise(5);
  const InteractionModel model(2, 2.0, {0.2, 0.3, 0.045}, {false, false});
  const ParticleEnsemble e(2, std::vector<double>{0.0, 0.0, 1.0, 1.0});
  const double dt = 0.04, sigma = 0.5;
  const auto next = em_step(e, model, dt, sigma, noise, 3, 8);
  std::vector<double> inc(2);
  noise.increment(3, 1, 8, dt, inc);
  EXPECT_EQ(next.position(1)[0], 1.0 + std::sqrt(2 * sigma) * inc[0]);
  EXPECT_EQ(next.position(1)[1], 1.0 + std::sqrt(2 * sigma) * inc[1]);
}

TEST(EmStep, BlowUpNamesParticle) {
  const NoiseStream noise(5);
  const InteractionModel model(2, 2.0, {0.2, 0.3, 0.045});
  ParticleEnsemble e(2, std::vector<double>{0.0, 0.0, 1.0, 1.0, 2.0, 2.0});
  e.position(2)[0] = std::numeric_limits<double>::infinity();
  try {
    EulerMaruyamaStepper stepper(model, 0.1, noise);
    stepper.step(e, 0.01, 0, 4);
    FAIL() << "expected BlowUpError";
  } catch (const BlowUpError& err) {
    EXPECT_EQ(err.step(), 4u);
  }
}

TEST(Stepper, PermutationExchangeability) {
  const NoiseStream noise(77);
  const InteractionModel model(2, 2.0, {0.3, 0.4, 0.08});
  const auto base = random_ensemble(2, 30, 0.4, 29);
  std::vector<std::size_t> perm(30);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(31));

  // Particle k of the permuted ensemble is base particle perm[k] with its key.
  std::vector<double> pos(60);
  std::vector<std::uint64_t> ids(30);
  for (std::size_t k = 0; k < 30; ++k) {
    pos[2 * k] = base.position(perm[k])[0];
    pos[2 * k + 1] = base.position(perm[k])[1];
    ids[k] = perm[k];
  }
  ParticleEnsemble permuted(2, pos);
  permuted.set_ids(ids);
  auto a = base;
  EulerMaruyamaStepper s1(model, 0.3, noise), s2(model, 0.3, noise, DriftMethod::kDirect, 0.0, 2);
  for (std::uint64_t step = 0; step < 5; ++step) {
    s1.step(a, 1e-3, 0, step);
    s2.step(permuted, 1e-3, 0, step);
  }
  for (std::size_t k = 0; k < 30; ++k) {
    EXPECT_EQ(permuted.position(k)[0], a.position(perm[k])[0]);
    EXPECT_EQ(permuted.position(k)[1], a.position(perm[k])[1]);
  }
}

TEST(SimConfig, ViolationsAreAllReported) {
  SimConfig cfg;
  cfg.m = 2.5;
  cfg.kernel = {0.5, 0.5, 0.2};
  cfg.workers = 0;
  const auto v = cfg.violations();
  EXPECT_EQ(v.size(), 3u);
  EXPECT_THROW(cfg.validate(), ConfigError);

  SimConfig ok;
  EXPECT_TRUE(ok.violations().empty());
  ok.dt = 1.0;
  EXPECT_FALSE(ok.violations(true).empty());
  EXPECT_TRUE(ok.violations(false).empty());
}

TEST(SimConfig, StepsAndOutputSteps) {
  SimConfig cfg;
  cfg.horizon = 0.3;
  cfg.dt = 0.1;
  EXPECT_EQ(cfg.steps(), 3u);
  cfg.dt = 0.07;
  EXPECT_EQ(cfg.steps(), 5u);
  EXPECT_DOUBLE_EQ(cfg.effective_dt(), 0.06);
  cfg.output_times = {0.3, 0.0, 0.12, 0.12};
  EXPECT_EQ(cfg.output_steps(), (std::vector<std::size_t>{0, 2, 5}));
}

TEST(Simulate, ZeroHorizonDriftsOffAndDeterminism) {
  SimConfig cfg;
  cfg.particles = 64;
  cfg.horizon = 0.0;
  const auto zero = simulate(cfg);
  ASSERT_EQ(zero.size(), 1u);
  EXPECT_EQ(zero[0], sample_initial(cfg.initial, 2, 64, cfg.seed));

  cfg.horizon = 0.05;
  cfg.dt = 0.01;
  cfg.sigma = 0.0;
  cfg.drifts = {false, false};
  cfg.output_times = {0.0, 0.02, 0.05};
  const auto still = simulate(cfg);
  ASSERT_EQ(still.size(), 3u);
  for (const auto& s : still) {
    EXPECT_TRUE(std::equal(s.positions().begin(), s.positions().end(), zero[0].positions().begin()));
  }

  cfg.sigma = 0.5;
  cfg.drifts = {true, true};
  cfg.dt = 1e-3;
  const auto a = simulate(cfg, 2);
  cfg.workers = 3;
  const auto b = simulate(cfg, 2);
  EXPECT_EQ(a, b);
  EXPECT_DOUBLE_EQ(a.back().time(), 0.05);
}
