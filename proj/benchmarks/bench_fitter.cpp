#include <vector>

#include <benchmark/benchmark.h>

#include "bullbear/fitter.hpp"
#include "bullbear/oracle.hpp"

using namespace bullbear;

static std::vector<double> synthetic(unsigned g) {
  std::vector<double> w;
  std::vector<double> r;
  for (unsigned h = 0; h < g; ++h) {
    w.push_back(1.0 + h);
    r.push_back(-0.3 + 0.25 * h);
  }
  std::vector<double> m;
  for (unsigned n = 1; n <= 2 * g; ++n) m.push_back(oracle::compound_poisson_moment<double>(w, r, n));
  return m;
}

static void BM_Fit(benchmark::State& state) {
  const auto g = static_cast<unsigned>(state.range(0));
  const auto m = synthetic(g);
  for (auto _ : state) benchmark::DoNotOptimize(fit(std::span<const double>(m), g, 1'000'000));
}
BENCHMARK(BM_Fit)->Arg(1)->Arg(2)->Arg(3)->Arg(4);

static void BM_PencilRootsDouble(benchmark::State& state) {
  const auto m = synthetic(3);
  const auto pencil = hankel_pencil(cumulants_from_moments<double>(m));
  for (auto _ : state) benchmark::DoNotOptimize(pencil_roots(pencil));
}
BENCHMARK(BM_PencilRootsDouble);

BENCHMARK_MAIN();
