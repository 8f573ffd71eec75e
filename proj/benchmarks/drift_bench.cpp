#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "kslab/initial_datum.hpp"
#include "kslab/particle_system.hpp"

namespace {

kslab::ParticleEnsemble unit_box(int d, std::size_t n) {
  kslab::InitialDatum box;
  box.kind = kslab::InitialDatum::Kind::kUniformBox;
  box.center.assign(static_cast<std::size_t>(d), 0.5);
  box.scale = 0.5;
  return kslab::sample_initial(box, d, n, 7);
}

kslab::InteractionModel model(int d, double eps, kslab::DriftSwitches sw) {
  return kslab::InteractionModel(d, 2.0, {eps, eps, std::pow(eps, d) / 2.0}, sw);
}

void BM_DriftDirect(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto ens = unit_box(2, n);
  const auto m = model(2, 0.05, {true, true});
  std::vector<double> out(2 * n);
  for (auto _ : state) {
    kslab::drift_all_direct(ens, m, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n * n));
}

void BM_RepulsionDirect(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto ens = unit_box(2, n);
  const auto m = model(2, 0.05, {false, true});
  std::vector<double> rho(n), grad(2 * n);
  for (auto _ : state) {
    kslab::repulsion_sums_direct(ens, m, rho, grad);
    benchmark::DoNotOptimize(grad.data());
  }
}

void BM_RepulsionCellList(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto ens = unit_box(2, n);
  const auto m = model(2, 0.05, {false, true});
  std::vector<double> rho(n), grad(2 * n);
  for (auto _ : state) {
    kslab::repulsion_sums_celllist(ens, m, 0.05, rho, grad);
    benchmark::DoNotOptimize(grad.data());
  }
}

}  // namespace

BENCHMARK(BM_DriftDirect)->Arg(1000)->Arg(4000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RepulsionDirect)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RepulsionCellList)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
