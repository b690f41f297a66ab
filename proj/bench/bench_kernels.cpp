#include <benchmark/benchmark.h>

#include <map>

#include "onn/generators.hpp"
#include "onn/kernels.hpp"

using namespace onn;

namespace {

struct Fixture {
  WeightedGraph g;
  StateMatrix x;
  std::vector<Index> label;
};

const Fixture& fixture(Index n) {
  static std::map<Index, Fixture> cache;
  auto it = cache.find(n);
  if (it == cache.end()) {
    Fixture f;
    f.g = generate({GraphKind::Community, n, 4, n / 50, 3});
    f.x = init_state(n, 16, InitLaw::Gaussian, 4).values();
    f.label.assign(n, 0);
    it = cache.emplace(n, std::move(f)).first;
  }
  return it->second;
}

template <void (*Apply)(const WeightedGraph&, const StateMatrix&, StateMatrix&)>
void BM_LaplacianApply(benchmark::State& state) {
  const Fixture& f = fixture(state.range(0));
  set_threads(static_cast<int>(state.range(1)));
  StateMatrix out(f.x.rows(), f.x.cols());
  for (auto _ : state) {
    Apply(f.g, f.x, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <double (*Energy)(const WeightedGraph&, const StateMatrix&)>
void BM_EdgeEnergy(benchmark::State& state) {
  const Fixture& f = fixture(state.range(0));
  set_threads(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(Energy(f.g, f.x));
}

template <std::vector<double> (*Forman)(const WeightedGraph&)>
void BM_Forman(benchmark::State& state) {
  const Fixture& f = fixture(state.range(0));
  set_threads(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(Forman(f.g));
}

template <std::vector<PairCandidate> (*Nearest)(const WeightedGraph&, const StateMatrix&, std::span<const Index>,
                                                std::size_t)>
void BM_NearestPairs(benchmark::State& state) {
  const Fixture& f = fixture(state.range(0));
  set_threads(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(Nearest(f.g, f.x, f.label, 32));
}

void sizes(benchmark::internal::Benchmark* b) {
  for (int n : {1000, 4000})
    for (int t : {1, 2, 4}) b->Args({n, t});
}

}  // namespace

BENCHMARK(BM_LaplacianApply<kernels::serial::laplacian_apply>)->Apply(sizes)->UseRealTime();
BENCHMARK(BM_LaplacianApply<kernels::omp::laplacian_apply>)->Apply(sizes)->UseRealTime();
BENCHMARK(BM_EdgeEnergy<kernels::serial::edge_energy>)->Apply(sizes)->UseRealTime();
BENCHMARK(BM_EdgeEnergy<kernels::omp::edge_energy>)->Apply(sizes)->UseRealTime();
BENCHMARK(BM_Forman<kernels::serial::forman>)->Apply(sizes)->UseRealTime();
BENCHMARK(BM_Forman<kernels::omp::forman>)->Apply(sizes)->UseRealTime();
BENCHMARK(BM_NearestPairs<kernels::serial::nearest_pairs>)->Apply(sizes)->UseRealTime();
BENCHMARK(BM_NearestPairs<kernels::omp::nearest_pairs>)->Apply(sizes)->UseRealTime();

BENCHMARK_MAIN();
