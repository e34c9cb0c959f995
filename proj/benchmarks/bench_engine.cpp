#include <benchmark/benchmark.h>

#include "bds/averaging.hpp"
#include "bds/engine.hpp"
#include "bds/multiscale.hpp"
#include "bds/stats.hpp"
#include "bds/toy.hpp"

namespace {

using namespace bds;

const ToyParams kParams{1.0, 2.0, 0.2, 0.1, 1.0, 1.0};

void BM_SimulateDominating(benchmark::State& state) {
  auto model = make_toy_model();
  auto env = EnvironmentPath::constant(kParams.to_regime());
  RandomSource source(7);
  std::uint64_t rep = 0;
  std::size_t records = 0;
  for (auto _ : state) {
    const auto skeleton = simulate_dominating(*model, env, {1, 1}, 5.0, source, rep++);
    records += skeleton.records.size();
    benchmark::DoNotOptimize(skeleton.records.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(records));
}
BENCHMARK(BM_SimulateDominating);

void BM_SimulateBds(benchmark::State& state) {
  const double epsilon = 1.0 / static_cast<double>(state.range(0));
  auto model = scale_swap_intensities(make_toy_model(), epsilon);
  auto env = EnvironmentPath::constant(kParams.to_regime());
  RandomSource source(11);
  std::uint64_t rep = 0;
  std::size_t records = 0;
  for (auto _ : state) {
    const auto run = simulate_bds(*model, env, {1, 1}, 2.0, source, rep++);
    records += run.skeleton.records.size();
    benchmark::DoNotOptimize(run.path.events.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(records));
}
BENCHMARK(BM_SimulateBds)->Arg(1)->Arg(10)->Arg(100);

void BM_OracleSimulate(benchmark::State& state) {
  auto model = make_toy_model();
  auto env = EnvironmentPath::constant(kParams.to_regime());
  RandomSource source(13);
  std::uint64_t rep = 0;
  for (auto _ : state) {
    const auto path = oracle_simulate(*model, env, {1, 1}, 2.0, source, rep++);
    benchmark::DoNotOptimize(path.events.data());
  }
}
BENCHMARK(BM_OracleSimulate);

void BM_StationaryDistribution(benchmark::State& state) {
  auto model = make_toy_model();
  const ToyParams params{0.0, 0.0, 0.0, 0.0, 1.0, 1.0};
  const Regime regime = params.to_regime();
  const auto n = static_cast<std::int64_t>(state.range(0));
  for (auto _ : state) {
    const auto kernel = stationary_distribution(build_swap_generator(*model, regime, 0.0, n));
    benchmark::DoNotOptimize(kernel.probabilities.data());
  }
}
BENCHMARK(BM_StationaryDistribution)->Arg(10)->Arg(50)->Arg(200);

void BM_LevelSetEnumeration(benchmark::State& state) {
  const auto n = static_cast<std::int64_t>(state.range(0));
  for (auto _ : state) {
    const LevelSet level(n, 4, 10'000'000);
    benchmark::DoNotOptimize(level.states().data());
  }
}
BENCHMARK(BM_LevelSetEnumeration)->Arg(10)->Arg(30);

void BM_OccupationEstimate(benchmark::State& state) {
  auto base = make_toy_model();
  const ToyParams params{0.05, 0.1, 0.0, 0.0, 1.0, 1.0};
  auto env = EnvironmentPath::constant(params.to_regime());
  const double epsilon = 0.01;
  auto scaled = scale_swap_intensities(base, epsilon);
  RandomSource source(17);
  const auto run = simulate_bds(*scaled, env, {1, 1}, 10.0, source, 0);
  OccupationOptions options;
  options.burn_in_expected_swaps = 5.0 / epsilon;
  for (auto _ : state) {
    OccupationAccumulator acc(2, Weighting::Uniform);
    acc.add_path(run.path, *scaled, env, 0.0, 10.0, options);
    benchmark::DoNotOptimize(&acc);
  }
}
BENCHMARK(BM_OccupationEstimate);

}  // namespace

BENCHMARK_MAIN();
