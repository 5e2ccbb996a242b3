#include <cmath>

#include <benchmark/benchmark.h>

#include "bullbear/moments.hpp"
#include "bullbear/oracle.hpp"

using namespace bullbear;

static void BM_MultigroupFloat(benchmark::State& state) {
  const auto g = static_cast<unsigned>(state.range(0));
  const auto n = static_cast<unsigned>(state.range(1));
  std::vector<GroupSpec> groups;
  for (unsigned h = 0; h < g; ++h) groups.push_back({0.8 + 0.1 * h, 100'000 + 1000 * h});
  const ModelParams params(groups, 1'000'000);
  for (auto _ : state) benchmark::DoNotOptimize(moment_multigroup(params, 250.5, n));
}
BENCHMARK(BM_MultigroupFloat)->ArgsProduct({{1, 2, 3, 4}, {2, 4, 8}});

static void BM_TwoGroupExact(benchmark::State& state) {
  const auto n = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(moment_two_group_exact(400'000, 350'000, 1'000'000, 10, n));
}
BENCHMARK(BM_TwoGroupExact)->Arg(2)->Arg(4)->Arg(8);

static void BM_Limit(benchmark::State& state) {
  const LimitParams limit{{0.3, 0.5}, {0.9, 1.1}, 1000, static_cast<unsigned>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(moment_limit(limit));
}
BENCHMARK(BM_Limit)->Arg(4)->Arg(8);

static void BM_Enumeration(benchmark::State& state) {
  const ModelParams params({{0.5, 1}, {0.75, 1}, {2.0, 2}}, 4);
  const auto t = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(oracle::enumerate_moment(params, t, 4));
}
BENCHMARK(BM_Enumeration)->Arg(6)->Arg(8)->Arg(10);

BENCHMARK_MAIN();
