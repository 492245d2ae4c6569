#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "lotscan/rasterize.hpp"

namespace {

lotscan::PolygonGeom star(double cx, double cy, double radius, int arms) {
    std::vector<lotscan::Point> ring;
    for (int i = 0; i < arms * 2; ++i) {
        const double a = 3.14159265358979 * i / arms;
        const double r = i % 2 ? radius * 0.45 : radius;
        ring.push_back({cx + r * std::cos(a), cy + r * std::sin(a)});
    }
    ring.push_back(ring.front());
    lotscan::PolygonGeom g;
    g.rings.push_back(std::move(ring));
    return g;
}

void ScanlineFill(benchmark::State& state) {
    const std::int64_t dim = state.range();
    const auto g = star(dim / 2.0, dim / 2.0, dim * 0.45, 7);
    for (auto _ : state) {
        auto m = lotscan::rasterize_polygon_pixels(g, dim, dim);
        benchmark::DoNotOptimize(m);
    }
    state.SetItemsProcessed(state.iterations() * dim * dim);
}
BENCHMARK(ScanlineFill)->Range(64, 2048);

void PerPixelPointInPolygon(benchmark::State& state) {
    const std::int64_t dim = state.range();
    const auto g = star(dim / 2.0, dim / 2.0, dim * 0.45, 7);
    for (auto _ : state) {
        lotscan::BitMask m(dim, dim);
        for (std::int64_t y = 0; y < dim; ++y)
            for (std::int64_t x = 0; x < dim; ++x)
                if (lotscan::point_in_polygon(g, x + 0.5, y + 0.5)) m.set(x, y);
        benchmark::DoNotOptimize(m);
    }
    state.SetItemsProcessed(state.iterations() * dim * dim);
}
BENCHMARK(PerPixelPointInPolygon)->Range(64, 512);

} // namespace
