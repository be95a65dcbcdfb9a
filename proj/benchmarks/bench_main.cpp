#include <benchmark/benchmark.h>

#include "maxflat/flow.hpp"
#include "maxflat/height.hpp"
#include "maxflat/partition.hpp"

using namespace maxflat;

namespace {

void BM_Iwasawa(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  RandomStream rng(42);
  const GroupElement g = GroupElement::random(n, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(iwasawa(g));
  }
}
BENCHMARK(BM_Iwasawa)->Arg(2)->Arg(4)->Arg(8);

void BM_WedgeCoordinates(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int k = static_cast<int>(state.range(1));
  RandomStream rng(43);
  const Matrix rows = rng.gaussian_matrix(k, n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(wedge_rows(rows));
  }
}
BENCHMARK(BM_WedgeCoordinates)->Args({6, 3})->Args({8, 4})->Args({15, 7});

void BM_AdjointApply(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  RandomStream rng(44);
  const WeightedRep rep = WeightedRep::adjoint_rep(n);
  const GroupElement g = GroupElement::random(n, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rep.apply(g));
  }
}
BENCHMARK(BM_AdjointApply)->Arg(3)->Arg(5);

void BM_Classify(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  RandomStream rng(45);
  const WeightedRep rep = WeightedRep::std_rep(n);
  const PartitionContext ctx = make_partition_context(rep);
  const GroupElement g = GroupElement::random(n, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(classify_with_context(g, rep, ctx));
  }
}
BENCHMARK(BM_Classify)->Arg(3)->Arg(5);

void BM_HessHeight(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  RandomStream rng(46);
  const HeightProblem p{random_cartan(n, rng), GroupElement::random(n, rng)};
  const CartanVector t = random_cartan(n, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hess_height(p, t));
  }
}
BENCHMARK(BM_HessHeight)->Arg(3)->Arg(5);

void BM_FlowIntegrate(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  RandomStream rng(47);
  const CartanVector h = random_regular_cartan(n, rng, 0.3);
  const Matrix k = haar_orthogonal(n, rng);
  const Matrix x0 = k * h.diagonal() * k.transpose();
  FlowControls controls;
  controls.t_end = 50.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate(x0, controls));
  }
}
BENCHMARK(BM_FlowIntegrate)->Arg(3)->Arg(5);

void BM_FindCPoint(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  RandomStream rng(48);
  const CartanVector h0 = random_generic_cartan(n, rng);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(find_C_point(h0, ++seed));
  }
}
BENCHMARK(BM_FindCPoint)->Arg(3)->Arg(4);

}  // namespace

BENCHMARK_MAIN();
