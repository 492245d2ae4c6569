#include <benchmark/benchmark.h>

#include <random>

#include "lotscan/rle.hpp"

namespace {

lotscan::BitMask blobby_mask(std::int64_t dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    lotscan::BitMask m(dim, dim);
    // A few solid rectangles, like instance masks rather than noise.
    for (int k = 0; k < 6; ++k) {
        const auto x0 = static_cast<std::int64_t>(rng() % dim);
        const auto y0 = static_cast<std::int64_t>(rng() % dim);
        const auto w = static_cast<std::int64_t>(1 + rng() % (dim / 3));
        const auto h = static_cast<std::int64_t>(1 + rng() % (dim / 3));
        for (std::int64_t y = y0; y < std::min(dim, y0 + h); ++y)
            for (std::int64_t x = x0; x < std::min(dim, x0 + w); ++x) m.set(x, y);
    }
    return m;
}

void EncodeRle(benchmark::State& state) {
    const auto m = blobby_mask(state.range(), 1);
    for (auto _ : state) {
        auto r = lotscan::rle_encode(m);
        benchmark::DoNotOptimize(r);
    }
    state.SetItemsProcessed(state.iterations() * state.range() * state.range());
}
BENCHMARK(EncodeRle)->Range(64, 1024);

void DecodeRle(benchmark::State& state) {
    const auto r = lotscan::rle_encode(blobby_mask(state.range(), 2));
    for (auto _ : state) {
        auto m = lotscan::rle_decode(r);
        benchmark::DoNotOptimize(m);
    }
    state.SetItemsProcessed(state.iterations() * state.range() * state.range());
}
BENCHMARK(DecodeRle)->Range(64, 1024);

void MaskIntersectionRunMerge(benchmark::State& state) {
    const auto a = lotscan::rle_encode(blobby_mask(state.range(), 3));
    const auto b = lotscan::rle_encode(blobby_mask(state.range(), 4));
    for (auto _ : state) {
        benchmark::DoNotOptimize(lotscan::rle_intersection_area(a, b));
    }
}
BENCHMARK(MaskIntersectionRunMerge)->Range(64, 1024);

void MaskIntersectionDense(benchmark::State& state) {
    const auto a = lotscan::rle_encode(blobby_mask(state.range(), 3));
    const auto b = lotscan::rle_encode(blobby_mask(state.range(), 4));
    for (auto _ : state) {
        const auto da = lotscan::rle_decode(a);
        const auto db = lotscan::rle_decode(b);
        std::int64_t inter = 0;
        for (std::size_t i = 0; i < da.bits.size(); ++i) inter += da.bits[i] & db.bits[i];
        benchmark::DoNotOptimize(inter);
    }
}
BENCHMARK(MaskIntersectionDense)->Range(64, 1024);

} // namespace
