#include <benchmark/benchmark.h>

#include "midas/keymech.hpp"
#include "midas/tensor.hpp"

using namespace midas;

static void BM_BuildRandomBasis(benchmark::State& state) {
    const auto d = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(build_random_basis(d, 0.4, 42));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BuildRandomBasis)->RangeMultiplier(4)->Range(64, 4096)->Unit(benchmark::kMillisecond)->Complexity();

static void BM_ApplyRandomBasis(benchmark::State& state) {
    const auto d = static_cast<std::size_t>(state.range(0));
    const OrthoKey key = build_random_basis(d, 0.4, 42);
    const Latent z = gaussian_latent(Shape{1, 1, d}, 1);
    for (auto _ : state) benchmark::DoNotOptimize(ortho_apply(key, z.values()));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ApplyRandomBasis)->RangeMultiplier(4)->Range(64, 4096);

static void BM_ApplyNoiseFlip(benchmark::State& state) {
    const auto d = static_cast<std::size_t>(state.range(0));
    const FlipKey key = build_flip(d, 42);
    const Latent z = gaussian_latent(Shape{1, 1, d}, 1);
    for (auto _ : state) benchmark::DoNotOptimize(flip_apply(key, z.values()));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ApplyNoiseFlip)->RangeMultiplier(4)->Range(64, 4096);

BENCHMARK_MAIN();
