#include <benchmark/benchmark.h>

#include <random>

#include "lotscan/detection_geometry.hpp"

namespace {

lotscan::FeatureMap noisy_map(int channels, std::int64_t dim) {
    std::mt19937_64 rng(3);
    auto fm = lotscan::make_feature_map(channels, dim, dim, 16.0);
    for (auto& v : fm.values) v = static_cast<float>(rng() % 1000) / 500.0f;
    return fm;
}

void RoiPool32(benchmark::State& state) {
    const auto fm = noisy_map(state.range(), 64);
    const lotscan::BBox roi{100, 120, 700, 650};
    for (auto _ : state) {
        auto out = lotscan::roi_pool(fm, roi);
        benchmark::DoNotOptimize(out);
    }
}
BENCHMARK(RoiPool32)->Arg(16)->Arg(64)->Arg(256);

void RoiAlign32(benchmark::State& state) {
    const auto fm = noisy_map(state.range(), 64);
    const lotscan::BBox roi{100, 120, 700, 650};
    for (auto _ : state) {
        auto out = lotscan::roi_align(fm, roi);
        benchmark::DoNotOptimize(out);
    }
}
BENCHMARK(RoiAlign32)->Arg(16)->Arg(64)->Arg(256);

void AnchorGrid(benchmark::State& state) {
    const lotscan::AnchorConfig cfg;
    for (auto _ : state) {
        auto anchors = lotscan::generate_anchors(cfg, state.range(), state.range());
        benchmark::DoNotOptimize(anchors);
    }
    state.SetItemsProcessed(state.iterations() * state.range() * state.range() * 9);
}
BENCHMARK(AnchorGrid)->Range(8, 128);

} // namespace
