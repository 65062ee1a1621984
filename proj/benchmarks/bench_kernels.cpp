#include <benchmark/benchmark.h>

#include "fragcoal/coalescent.hpp"
#include "fragcoal/density.hpp"
#include "fragcoal/excursion.hpp"
#include "fragcoal/pde.hpp"
#include "fragcoal/rng.hpp"

using namespace fragcoal;

namespace {

const SubordinatorSpec kSpec =
    SubordinatorSpec::compound_poisson(1.0, JumpLaw::constant(1.0), 1.0);

void BM_BrownianFragmentation(benchmark::State& state) {
    RandomStream rng = RandomStream::root(1, "bench-frag");
    const auto n = static_cast<std::uint32_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            fragmentation_at(vervaat(brownian_bridge(n, rng)), 1.0).size());
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_BrownianFragmentation)->Arg(1 << 12)->Arg(1 << 16)->Arg(1 << 18);

void BM_DensityRatio(benchmark::State& state) {
    RandomStream rng = RandomStream::root(2, "bench-ratio");
    const auto mc = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            density_ratio(RatioQuery{kSpec, 0.5, -0.5, mc}, rng).value);
    }
    state.SetItemsProcessed(state.iterations() * mc);
}
BENCHMARK(BM_DensityRatio)->Arg(10000)->Arg(100000);

void BM_PartitionWeight(benchmark::State& state) {
    RandomStream rng = RandomStream::root(3, "bench-weight");
    WeightEvaluator ev(kSpec, 100000, rng.substream(0));
    const MassPartition part =
        fragmentation_at(vervaat(brownian_bridge(1 << 14, rng)), 1.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(ev.partition_weight(1.0, part, 10000, rng).value);
    }
    state.SetItemsProcessed(state.iterations() * part.size() * 10000);
}
BENCHMARK(BM_PartitionWeight);

void BM_CoalescentTrajectory(benchmark::State& state) {
    RandomStream rng = RandomStream::root(4, "bench-coal");
    const auto n = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(standard_shifted_state(n, 0.0, rng).largest());
    }
}
BENCHMARK(BM_CoalescentTrajectory)->Arg(256)->Arg(1024);

void BM_PdeResidual(benchmark::State& state) {
    RandomStream rng = RandomStream::root(5, "bench-pde");
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            pde_residual(0.5, 0.5, kSpec, 8192, 1e-4, 1, rng).value);
    }
}
BENCHMARK(BM_PdeResidual);

}  // namespace

BENCHMARK_MAIN();
