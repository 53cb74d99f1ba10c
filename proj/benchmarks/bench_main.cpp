#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "sphrs/metrics.hpp"
#include "sphrs/pipeline.hpp"
#include "sphrs/resamplers.hpp"
#include "sphrs/synthetic.hpp"
#include "sphrs/triangulation.hpp"

namespace {

using namespace sphrs;

std::vector<PixelCoord> cloud(int n) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> d(0.0, 100.0);
    std::vector<PixelCoord> pts(static_cast<std::size_t>(n));
    for (auto& p : pts) p = {d(rng), d(rng)};
    return pts;
}

void BM_Triangulation(benchmark::State& state) {
    const auto pts = cloud(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        Triangulation tri(pts);
        benchmark::DoNotOptimize(tri);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Triangulation)->Arg(256)->Arg(4096)->Arg(65536);

void BM_CloughTocherQueries(benchmark::State& state) {
    const auto pts = cloud(2000);
    std::vector<double> vals(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) vals[i] = std::sin(pts[i].u * 0.1) * std::cos(pts[i].v * 0.07);
    const Triangulation tri(pts);
    const CloughTocher ct(tri, vals);
    const auto queries = cloud(1000);
    for (auto _ : state) {
        for (const auto& q : queries) benchmark::DoNotOptimize(interpolate_cubic(ct, q));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(queries.size()));
}
BENCHMARK(BM_CloughTocherQueries);

// Full ERP 512x256 -> CMP conversion, single thread.
void BM_Convert(benchmark::State& state) {
    const auto erp = ProjectionFormat::erp(512, 256);
    const auto cmp = ProjectionFormat::cmp(cmp_face_size_for(512, 256));
    const ImageBuffer img = harmonic_image(erp, 1, 128);
    ConversionConfig cfg;
    cfg.resampler = static_cast<ResamplerKind>(state.range(0));
    cfg.mode = state.range(1) != 0 ? PipelineMode::Var : PipelineMode::Classical;
    for (auto _ : state) benchmark::DoNotOptimize(convert(img, erp, cmp, cfg, {1, true}));
    state.SetLabel(std::string(to_string(cfg.resampler)) + (state.range(1) != 0 ? "/var" : "/classical"));
}
BENCHMARK(BM_Convert)
    ->ArgsProduct({{0, 1, 2, 3}, {0, 1}})
    ->Unit(benchmark::kMillisecond);

void BM_Metrics(benchmark::State& state) {
    const auto erp = ProjectionFormat::erp(1024, 512);
    const ImageBuffer a = harmonic_image(erp, 1, 64);
    const ImageBuffer b = harmonic_image(erp, 2, 64);
    for (auto _ : state) {
        benchmark::DoNotOptimize(ws_psnr(a, b, erp));
        benchmark::DoNotOptimize(ssim(a, b));
    }
}
BENCHMARK(BM_Metrics)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
