#include <benchmark/benchmark.h>

#include "midas/channel.hpp"
#include "midas/metrics.hpp"

using namespace midas;

namespace {

ImageBuffer pattern(std::size_t side, int shift) {
    ImageBuffer img(side, side);
    for (std::size_t y = 0; y < side; ++y) {
        for (std::size_t x = 0; x < side; ++x) {
            for (std::size_t c = 0; c < 3; ++c) img.at(y, x, c) = static_cast<std::uint8_t>((x * 3 + y * 5 + c * 40 + shift) & 0xFF);
        }
    }
    return img;
}

} // namespace

static void BM_Ssim(benchmark::State& state) {
    const auto side = static_cast<std::size_t>(state.range(0));
    const ImageBuffer a = pattern(side, 0);
    const ImageBuffer b = pattern(side, 7);
    for (auto _ : state) benchmark::DoNotOptimize(ssim(a, b));
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_Ssim)->Arg(64)->Arg(512);

static void BM_Psnr(benchmark::State& state) {
    const auto side = static_cast<std::size_t>(state.range(0));
    const ImageBuffer a = pattern(side, 0);
    const ImageBuffer b = pattern(side, 7);
    for (auto _ : state) benchmark::DoNotOptimize(psnr(a, b));
}
BENCHMARK(BM_Psnr)->Arg(64)->Arg(512);

static void BM_JpegLike(benchmark::State& state) {
    const ImageBuffer a = pattern(static_cast<std::size_t>(state.range(0)), 0);
    for (auto _ : state) benchmark::DoNotOptimize(apply_jpeg(a, 70));
}
BENCHMARK(BM_JpegLike)->Arg(64)->Arg(512);

BENCHMARK_MAIN();
