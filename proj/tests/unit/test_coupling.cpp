#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "kslab/coupling.hpp"
#include "kslab/error.hpp"
#include "kslab/initial_datum.hpp"
#include "kslab/nonlinearity.hpp"

using namespace kslab;

namespace {

CouplingConfig small_config() {
  CouplingConfig cfg;
  cfg.sim.dimension = 2;
  cfg.sim.particles = 8;
  cfg.sim.sigma = 0.5;
  cfg.sim.horizon = 0.05;
  cfg.sim.dt = 0.005;
  cfg.sim.kernel = {0.5, 0.5, 0.125};
  cfg.sim.initial.scale = 0.4;
  cfg.sim.output_times = {0.0, 0.02, 0.05};
  cfg.grid = GridSpec{2, 48, 3.0};
  cfg.field_store_interval = 0.01;
  return cfg;
}

Trajectories make(std::size_t n, std::vector<std::vector<double>> pos) {
  Trajectories t;
  t.dimension = 1;
  t.particles = n;
  for (std::size_t k = 0; k < pos.size(); ++k) t.times.push_back(0.1 * k);
  t.positions = std::move(pos);
  return t;
}

}  // namespace

TEST(Coupling, DriftsOffGivesBitIdenticalSystems) {
  auto cfg = small_config();
  cfg.sim.drifts = {false, false};
  const auto mid = solve_drift_fields(cfg, PdeMode::kMollified);
  const auto lim = solve_drift_fields(cfg, PdeMode::kLimit);
  for (std::uint64_t rep = 0; rep < 3; ++rep) {
    const auto run = coupled_run(cfg, mid, lim, rep);
    ASSERT_FALSE(run.aborted);
    EXPECT_EQ(run.interacting, run.intermediate);
    EXPECT_EQ(run.intermediate, run.limit);
    EXPECT_EQ(run.interacting.times, (std::vector<double>{0.0, 0.02, 0.05}));
    // Also identical to the standalone runs.
    EXPECT_EQ(simulate_intermediate(cfg, mid, rep), run.intermediate);
    const auto snaps = simulate(cfg.sim, rep);
    EXPECT_TRUE(std::equal(snaps.back().positions().begin(), snaps.back().positions().end(),
                           run.interacting.positions.back().begin()));
  }
}

TEST(Coupling, ZeroHorizonReturnsInitialSample) {
  auto cfg = small_config();
  cfg.sim.horizon = 0.0;
  cfg.sim.output_times = {};
  const auto mid = solve_drift_fields(cfg, PdeMode::kMollified);
  const auto lim = solve_drift_fields(cfg, PdeMode::kLimit);
  const auto run = coupled_run(cfg, mid, lim, 4);
  const auto init = sample_initial(cfg.sim.initial, 2, cfg.sim.particles, cfg.sim.seed, 4);
  const std::vector<double> expect(init.positions().begin(), init.positions().end());
  for (const auto* tr : {&run.interacting, &run.intermediate, &run.limit}) {
    ASSERT_EQ(tr->positions.size(), 1u);
    EXPECT_EQ(tr->positions[0], expect);
  }
}

TEST(Coupling, OneStepMatchesHandEvaluatedFieldDrift) {
  for (auto mode : {PdeMode::kMollified, PdeMode::kLimit}) {
    auto cfg = small_config();
    cfg.sim.sigma = 0.0;
    cfg.sim.horizon = 0.005;
    cfg.sim.output_times = {};
    const auto fields = solve_drift_fields(cfg, mode);
    const GridSpec& g = cfg.grid;
    const std::size_t i = 20, j = 27;
    const ParticleEnsemble start(2, std::vector<double>{g.center(i), g.center(j)});
    const auto tr = simulate_field_driven(cfg, fields, start, 0);

    const MeanFieldOperator op(fields.params());
    const auto u0 = discretize(cfg.sim.initial, g);
    const auto grad_c = op.chemical_gradient(u0.values);
    const auto rho = op.potentials(u0.values).density;
    const std::size_t c = i * g.resolution + j;
    const double h = g.spacing();
    const double r = rho[c];
    const double slope = mode == PdeMode::kMollified
                             ? CutoffPressure(cfg.sim.m, cfg.sim.kernel.lambda).first(r)
                             : p_derivative(r, cfg.sim.m, 1);
    const double b0 = grad_c[0][c] - slope * (rho[c + g.resolution] - rho[c - g.resolution]) / (2 * h);
    const double b1 = grad_c[1][c] - slope * (rho[c + 1] - rho[c - 1]) / (2 * h);
    ASSERT_EQ(tr.positions.size(), 2u);
    EXPECT_NEAR(tr.positions[1][0], g.center(i) + 0.005 * b0, 1e-14);
    EXPECT_NEAR(tr.positions[1][1], g.center(j) + 0.005 * b1, 1e-14);
    EXPECT_NE(b0, 0.0);
  }
}

TEST(Coupling, ThreeDeterministicStepsMatchHandRolledStepping) {
  auto cfg = small_config();
  cfg.sim.sigma = 0.0;
  cfg.sim.particles = 2;
  cfg.sim.horizon = 0.015;
  cfg.sim.output_times = {};
  const auto mid = solve_drift_fields(cfg, PdeMode::kMollified);
  const auto lim = solve_drift_fields(cfg, PdeMode::kLimit);
  const auto run = coupled_run(cfg, mid, lim, 1);
  ASSERT_FALSE(run.aborted);

  auto ens = sample_initial(cfg.sim.initial, 2, 2, cfg.sim.seed, 1);
  std::vector<double> a(ens.positions().begin(), ens.positions().end()), b = a;
  const InteractionModel model(2, cfg.sim.m, cfg.sim.kernel);
  std::vector<double> drift(4), v(2);
  for (int k = 0; k < 3; ++k) {
    const double t = 0.005 * k;
    drift_all_direct(ens, model, drift);
    for (std::size_t q = 0; q < 4; ++q) ens.positions()[q] += 0.005 * drift[q];
    for (std::size_t p = 0; p < 2; ++p) {
      mid.drift(t, std::span<const double>(a.data() + 2 * p, 2), v);
      a[2 * p] += 0.005 * v[0];
      a[2 * p + 1] += 0.005 * v[1];
      lim.drift(t, std::span<const double>(b.data() + 2 * p, 2), v);
      b[2 * p] += 0.005 * v[0];
      b[2 * p + 1] += 0.005 * v[1];
    }
  }
  const std::vector<double> x(ens.positions().begin(), ens.positions().end());
  EXPECT_EQ(run.interacting.positions.back(), x);
  EXPECT_EQ(run.intermediate.positions.back(), a);
  EXPECT_EQ(run.limit.positions.back(), b);
}

TEST(Coupling, CentralParticleStaysPutUnderSymmetricField) {
  auto cfg = small_config();
  cfg.sim.sigma = 0.0;
  cfg.sim.horizon = 0.05;
  for (auto mode : {PdeMode::kMollified, PdeMode::kLimit}) {
    const auto fields = solve_drift_fields(cfg, mode);
    const ParticleEnsemble center(2, std::vector<double>{0.0, 0.0});
    const auto tr = simulate_field_driven(cfg, fields, center, 0);
    for (double v : tr.positions.back()) EXPECT_LE(std::abs(v), 1e-14);
  }
}

TEST(Coupling, LeavingTheGridAbortsTheReplication) {
  auto cfg = small_config();
  cfg.grid = GridSpec{2, 16, 0.8};
  cfg.sim.sigma = 4.0;
  cfg.sim.horizon = 0.2;
  cfg.sim.output_times = {};
  const auto mid = solve_drift_fields(cfg, PdeMode::kMollified);
  const auto run = coupled_run(cfg, mid, {}, 0);
  EXPECT_TRUE(run.aborted);
  EXPECT_FALSE(run.abort_reason.empty());
  EXPECT_THROW(simulate_intermediate(cfg, mid, 0), OutOfDomainError);
}

TEST(TrajectoryError, IdenticalAndShiftedSets) {
  const std::vector<Trajectories> a{make(2, {{0.0, 1.0}, {0.5, 2.0}}), make(2, {{1.0, -1.0}, {3.0, 0.0}})};
  for (auto metric : {ErrorAggregation::kMaxThenMean, ErrorAggregation::kMeanSquare}) {
    const auto zero = trajectory_error(a, a, metric);
    for (double e : zero.estimate) EXPECT_EQ(e, 0.0);
    for (double s : zero.standard_error) EXPECT_EQ(s, 0.0);

    auto b = a;
    for (auto& tr : b)
      for (auto& p : tr.positions)
        for (double& v : p) v += 0.5;
    const auto shifted = trajectory_error(a, b, metric);
    for (double e : shifted.estimate) EXPECT_DOUBLE_EQ(e, 0.25);
    for (double s : shifted.standard_error) EXPECT_EQ(s, 0.0);
    EXPECT_DOUBLE_EQ(shifted.sup_estimate, 0.25);
  }
}

TEST(TrajectoryError, HandComputedMeanAndStandardError) {
  // Squared distances per particle: rep 0 -> {1, 4}, rep 1 -> {9, 0}.
  const std::vector<Trajectories> a{make(2, {{0.0, 0.0}}), make(2, {{0.0, 0.0}})};
  const std::vector<Trajectories> b{make(2, {{1.0, 2.0}}), make(2, {{3.0, 0.0}})};
  const auto mx = trajectory_error(a, b, ErrorAggregation::kMaxThenMean);
  // Maxima 4 and 9: mean 6.5, sample sd 3.5355, se = sd / sqrt(2) = 2.5.
  EXPECT_DOUBLE_EQ(mx.estimate[0], 6.5);
  EXPECT_NEAR(mx.standard_error[0], 2.5, 1e-15);
  const auto ms = trajectory_error(a, b, ErrorAggregation::kMeanSquare);
  // Means 2.5 and 4.5: mean 3.5, se 1.
  EXPECT_DOUBLE_EQ(ms.estimate[0], 3.5);
  EXPECT_NEAR(ms.standard_error[0], 1.0, 1e-15);
  EXPECT_EQ(to_string(ErrorAggregation::kMeanSquare), "mean_square");
}

TEST(TrajectoryError, ShapeMismatchThrows) {
  const std::vector<Trajectories> a{make(2, {{0.0, 0.0}})};
  const std::vector<Trajectories> b{make(1, {{0.0}})};
  const std::vector<Trajectories> two{make(2, {{0.0, 0.0}}), make(2, {{0.0, 0.0}})};
  EXPECT_THROW(trajectory_error(a, b, ErrorAggregation::kMeanSquare), InvalidArgument);
  EXPECT_THROW(trajectory_error(a, two, ErrorAggregation::kMeanSquare), InvalidArgument);
}

TEST(TrajectoryError, TriangleInequalityPerReplication) {
  auto cfg = small_config();
  const auto mid = solve_drift_fields(cfg, PdeMode::kMollified);
  const auto lim = solve_drift_fields(cfg, PdeMode::kLimit);
  std::vector<Trajectories> x, xb, xh;
  for (std::uint64_t r = 0; r < 6; ++r) {
    const auto run = coupled_run(cfg, mid, lim, r);
    ASSERT_FALSE(run.aborted);
    x.push_back(run.interacting);
    xb.push_back(run.intermediate);
    xh.push_back(run.limit);
  }
  const auto e_total = trajectory_error(x, xh, ErrorAggregation::kMaxThenMean);
  const auto e_fluct = trajectory_error(x, xb, ErrorAggregation::kMaxThenMean);
  const auto e_mf = trajectory_error(xb, xh, ErrorAggregation::kMaxThenMean);
  for (std::size_t k = 0; k < e_total.times.size(); ++k) {
    for (std::size_t r = 0; r < 6; ++r) {
      const double bound = std::pow(std::sqrt(e_fluct.samples[k][r]) + std::sqrt(e_mf.samples[k][r]), 2);
      EXPECT_LE(e_total.samples[k][r], bound * (1 + 1e-12) + 1e-300);
    }
  }
  EXPECT_GT(e_total.sup_estimate, 0.0);
}

TEST(CouplingConfig, Violations) {
  auto cfg = small_config();
  cfg.grid.resolution = 47;
  cfg.field_store_interval = 0.0;
  cfg.grid.dimension = 3;
  EXPECT_EQ(cfg.violations().size(), 3u);
  EXPECT_THROW(cfg.validate(), ConfigError);
}
