#include <benchmark/benchmark.h>

#include "midas/diffusion.hpp"
#include "midas/pipeline.hpp"

using namespace midas;

static void BM_DdimStep(benchmark::State& state) {
    const auto side = static_cast<std::size_t>(state.range(0));
    const auto sched = make_schedule(50, 0.4);
    const ToyPredictor pred;
    const Condition cond = Condition::with_prompt("a photo of a mountain lake");
    const Latent z = gaussian_latent(Shape{4, side, side}, 1);
    for (auto _ : state) benchmark::DoNotOptimize(ddim_step(z, 20, pred, cond, sched));
}
BENCHMARK(BM_DdimStep)->Arg(16)->Arg(64);

static void BM_EdictStep(benchmark::State& state) {
    const auto side = static_cast<std::size_t>(state.range(0));
    const auto sched = make_schedule(50, 0.4);
    const ToyPredictor pred;
    const Condition cond = Condition::with_prompt("a photo of a mountain lake");
    const LatentPair pair = LatentPair::twin(gaussian_latent(Shape{4, side, side}, 1));
    for (auto _ : state) benchmark::DoNotOptimize(edict_denoise(pair, 20, 19, pred, cond, sched, 0.93));
}
BENCHMARK(BM_EdictStep)->Arg(16)->Arg(64);

static void BM_HideN2(benchmark::State& state) {
    const Backend backend = make_toy_backend();
    StegoConfig cfg = StegoConfig::defaults_for(2);
    cfg.priv_seeds = {1, 2};
    cfg.prompt = "a photo of a mountain lake";
    const Reference ref = refgen(backend, cfg.pub_seed, cfg.prompt, cfg);
    const Shape seg = segment_shape(backend.latent, cfg.n1, cfg.n2);
    const std::vector<Latent> secrets{gaussian_latent(seg, 3), gaussian_latent(seg, 4)};
    for (auto _ : state) benchmark::DoNotOptimize(hide_latents(backend, secrets, cfg, ref));
}
BENCHMARK(BM_HideN2)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
