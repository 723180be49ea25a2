#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "nucdim/approx.hpp"
#include "nucdim/markers.hpp"
#include "nucdim/norm.hpp"
#include "nucdim/towers.hpp"

using namespace nucdim;

namespace {

PointSet all_points(const FiniteDynamicalSystem& sys) {
  PointSet out(sys.size());
  for (PointIndex x = 0; x < sys.size(); ++x) out[x] = x;
  return out;
}

CrossedElement random_element(const FiniteDynamicalSystem& sys, int radius, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-0.5, 0.5);
  CrossedElement a = CrossedElement::zero(sys);
  for (int p = -radius; p <= radius; ++p) {
    Function f(sys.size());
    for (auto& v : f) v = Complex(unit(rng), unit(rng));
    a = a + CrossedElement::monomial(sys, f, p);
  }
  return a;
}

void BM_GreedyMarkers(benchmark::State& state) {
  const std::vector<std::size_t> L{static_cast<std::size_t>(state.range(0))};
  const auto sys = make_cycle_system(L, 0);
  const auto K = all_points(sys);
  for (auto _ : state) benchmark::DoNotOptimize(greedy_markers(sys, 5, K, 0));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_GreedyMarkers)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

void BM_TowerFamily(benchmark::State& state) {
  const std::vector<std::size_t> L{static_cast<std::size_t>(state.range(0))};
  const auto sys = make_cycle_system(L, 0);
  const auto K = all_points(sys);
  for (auto _ : state) {
    const auto fam = build_tower_family(sys, K, 0, 1, 5, 0.5);
    benchmark::DoNotOptimize(verify_tower(sys, fam));
  }
}
BENCHMARK(BM_TowerFamily)->Arg(100)->Arg(1000)->Arg(5000);

void BM_NormDense(benchmark::State& state) {
  const std::vector<std::size_t> L{static_cast<std::size_t>(state.range(0))};
  const auto sys = make_cycle_system(L, 0);
  const auto a = random_element(sys, 2, 7);
  for (auto _ : state) benchmark::DoNotOptimize(norm(a).value);
}
BENCHMARK(BM_NormDense)->Arg(8)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_NormKrylov(benchmark::State& state) {
  const std::vector<std::size_t> L{static_cast<std::size_t>(state.range(0))};
  const auto sys = make_cycle_system(L, 0);
  const auto a = random_element(sys, 2, 7);
  NormOptions opts;
  opts.dense_limit = 16;
  for (auto _ : state) benchmark::DoNotOptimize(norm(a, opts).value);
}
BENCHMARK(BM_NormKrylov)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_Quotient(benchmark::State& state) {
  const std::vector<std::size_t> L{3, 5, 7};
  const auto sys = make_cycle_system(L, 0);
  const std::vector<CrossedElement> F{CrossedElement::unitary_power(sys, 1)};
  for (auto _ : state) {
    const auto q = quotient_approx(sys, invariant_split(sys, 7), 1, 0.1, 0);
    benchmark::DoNotOptimize(verify_quotient(q, F, NormOptions{}).max);
  }
}
BENCHMARK(BM_Quotient)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
