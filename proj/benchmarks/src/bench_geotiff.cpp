#include <benchmark/benchmark.h>

#include <random>

#include "lotscan/geotiff.hpp"

namespace {

lotscan::GeoRaster noisy_raster(std::int64_t dim) {
    std::mt19937_64 rng(9);
    auto r = lotscan::make_raster(dim, dim, 3, lotscan::GeoTransform{0, double(dim), 1, 1, 0});
    for (auto& p : r.pixels) p = static_cast<std::uint8_t>(rng() % 48 + 100);
    return r;
}

void ParseGeotiffUncompressed(benchmark::State& state) {
    const auto bytes = lotscan::encode_geotiff(noisy_raster(state.range()), false);
    for (auto _ : state) {
        auto r = lotscan::parse_geotiff(bytes);
        benchmark::DoNotOptimize(r);
    }
    state.SetBytesProcessed(state.iterations() * bytes.size());
}
BENCHMARK(ParseGeotiffUncompressed)->Range(64, 1024);

void ParseGeotiffDeflate(benchmark::State& state) {
    const auto bytes = lotscan::encode_geotiff(noisy_raster(state.range()), true);
    for (auto _ : state) {
        auto r = lotscan::parse_geotiff(bytes);
        benchmark::DoNotOptimize(r);
    }
    state.SetBytesProcessed(state.iterations() * bytes.size());
}
BENCHMARK(ParseGeotiffDeflate)->Range(64, 1024);

void MosaicTiles(benchmark::State& state) {
    const std::int64_t dim = state.range();
    std::vector<lotscan::GeoRaster> tiles;
    for (int i = 0; i < 4; ++i) {
        auto t = noisy_raster(dim);
        t.transform.origin_x = (i % 2) * dim;
        t.transform.origin_y = (i / 2 + 1) * dim;
        tiles.push_back(std::move(t));
    }
    for (auto _ : state) {
        auto m = lotscan::mosaic(tiles);
        benchmark::DoNotOptimize(m);
    }
    state.SetItemsProcessed(state.iterations() * dim * dim * 4);
}
BENCHMARK(MosaicTiles)->Range(64, 1024);

} // namespace
