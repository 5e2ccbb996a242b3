#include <benchmark/benchmark.h>

#include "bullbear/simulator.hpp"

using namespace bullbear;

static void BM_SamplePath(benchmark::State& state) {
  const ModelParams params({{0.9, 400}, {1.1, 500}}, 1000);
  const auto horizon = static_cast<std::uint64_t>(state.range(0));
  std::uint64_t i = 0;
  for (auto _ : state) {
    sim::RandomStream stream(1, i++);
    benchmark::DoNotOptimize(sim::sample_path(params, horizon, stream));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SamplePath)->Arg(10)->Arg(100)->Arg(1000);

static void BM_EstimateMoments(benchmark::State& state) {
  const sim::SimConfig config{ModelParams({{0.9, 400}, {1.1, 500}}, 1000), 100, 100'000, 4, 7};
  const auto workers = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sim::estimate_moments(config, workers));
}
BENCHMARK(BM_EstimateMoments)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
