#include <benchmark/benchmark.h>

#include <random>

#include "lotscan/detection_geometry.hpp"

namespace {

void Nms(benchmark::State& state) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::size_t n = state.range();
    std::vector<lotscan::BBox> boxes;
    std::vector<double> scores;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = u(rng) * 500, y = u(rng) * 500;
        boxes.push_back({x, y, x + 10 + u(rng) * 50, y + 10 + u(rng) * 50});
        scores.push_back(u(rng));
    }
    for (auto _ : state) {
        auto kept = lotscan::nms(boxes, scores, 0.5);
        benchmark::DoNotOptimize(kept);
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(Nms)->Range(64, 16384);

void SelectProposalsFunnel(benchmark::State& state) {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<lotscan::Proposal> props;
    for (int i = 0; i < 20000; ++i) {
        props.push_back({u(rng) * 2000, u(rng) * 2000, 20 + u(rng) * 100, 20 + u(rng) * 100,
                         u(rng)});
    }
    for (auto _ : state) {
        auto out = lotscan::select_proposals(props);
        benchmark::DoNotOptimize(out);
    }
}
BENCHMARK(SelectProposalsFunnel)->Unit(benchmark::kMillisecond);

} // namespace
