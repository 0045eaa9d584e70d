#include <random>

#include <benchmark/benchmark.h>

#include "spinthermo/enumerate.hpp"
#include "spinthermo/models.hpp"
#include "spinthermo/optimizer.hpp"

using namespace spinthermo;

namespace {

SpinHamiltonian random_complete(int n) {
  std::mt19937_64 rng(n);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  Topology t = Topology::complete(n);
  std::vector<double> h(n), j(t.size());
  for (auto& x : h) x = u(rng);
  for (auto& x : j) x = u(rng);
  return SpinHamiltonian(t, h, j);
}

void BM_EnumerateStats(benchmark::State& state) {
  const auto hm = random_complete(int(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_stats(hm, 1.0, 1));
  state.SetItemsProcessed(state.iterations() * (std::int64_t{1} << state.range(0)));
}
BENCHMARK(BM_EnumerateStats)->DenseRange(8, 20, 4)->Unit(benchmark::kMicrosecond);

void BM_EnumerateGradient(benchmark::State& state) {
  const auto hm = random_complete(int(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_gradient(hm, 1.0, 1));
  state.SetItemsProcessed(state.iterations() * (std::int64_t{1} << state.range(0)));
}
BENCHMARK(BM_EnumerateGradient)->DenseRange(8, 16, 4)->Unit(benchmark::kMicrosecond);

void BM_StarAnalytic(benchmark::State& state) {
  const StarParams p{int(state.range(0)), 0.5 * state.range(0), 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(star_stats(p));
}
BENCHMARK(BM_StarAnalytic)->Arg(14)->Arg(50);

void BM_TiedAdamStep(benchmark::State& state) {
  TiedSpace space({TiedFamily::star, int(state.range(0))});
  std::vector<double> theta{0.5 * state.range(0), 1.0}, grad;
  for (auto _ : state) benchmark::DoNotOptimize(space.evaluate(theta, 1.0, &grad, 1));
}
BENCHMARK(BM_TiedAdamStep)->Arg(24)->Arg(50);

}  // namespace

BENCHMARK_MAIN();
