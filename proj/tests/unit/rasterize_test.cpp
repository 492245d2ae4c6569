#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "lotscan/polygon.hpp"
#include "lotscan/rasterize.hpp"

using namespace lotscan;

namespace {

// Test-local even-odd ray cast, written independently of the library: count
// crossings at or left of the sample (the library counts strictly right;
// total crossings are even, so the parities agree).
bool pip_oracle(const PolygonGeom& g, double px, double py) {
    int crossings = 0;
    for (const auto& ring : g.rings) {
        for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
            const double x1 = ring[i].x, y1 = ring[i].y;
            const double x2 = ring[i + 1].x, y2 = ring[i + 1].y;
            const bool south1 = y1 <= py;
            const bool south2 = y2 <= py;
            if (south1 == south2) continue;
            const double t = (py - y1) / (y2 - y1);
            const double xi = x1 + t * (x2 - x1);
            if (xi <= px) ++crossings;
        }
    }
    return crossings % 2 == 1;
}

PolygonGeom closed_ring(std::vector<Point> pts) {
    if (!(pts.front() == pts.back())) pts.push_back(pts.front());
    PolygonGeom g;
    g.rings.push_back(std::move(pts));
    return g;
}

void check_against_oracle(const PolygonGeom& g, std::int64_t w, std::int64_t h) {
    const BitMask mask = rasterize_polygon_pixels(g, w, h);
    for (std::int64_t y = 0; y < h; ++y)
        for (std::int64_t x = 0; x < w; ++x) {
            const bool expect = pip_oracle(g, x + 0.5, y + 0.5);
            if (mask.get(x, y) != expect) {
                CAPTURE(x);
                CAPTURE(y);
                REQUIRE(mask.get(x, y) == expect);
            }
        }
}

} // namespace

TEST_CASE("square covering pixels [0,2)x[0,2) sets exactly 4 bits") {
    const auto g = closed_ring({{0, 0}, {2, 0}, {2, 2}, {0, 2}});
    const BitMask m = rasterize_polygon_pixels(g, 4, 4);
    CHECK(m.popcount() == 4);
    CHECK(m.get(0, 0));
    CHECK(m.get(1, 0));
    CHECK(m.get(0, 1));
    CHECK(m.get(1, 1));
}

TEST_CASE("polygon fully outside the grid rasterizes to all-zero") {
    const auto g = closed_ring({{10, 10}, {12, 10}, {12, 12}, {10, 12}});
    CHECK(rasterize_polygon_pixels(g, 4, 4).popcount() == 0);
}

TEST_CASE("grid-sized polygon rasterizes to all-one") {
    const auto g = closed_ring({{0, 0}, {4, 0}, {4, 4}, {0, 4}});
    CHECK(rasterize_polygon_pixels(g, 4, 4).popcount() == 16);
}

TEST_CASE("hole is excluded by even-odd fill") {
    PolygonGeom g = closed_ring({{0, 0}, {6, 0}, {6, 6}, {0, 6}});
    g.rings.push_back({{2, 2}, {4, 2}, {4, 4}, {2, 4}, {2, 2}});
    const BitMask m = rasterize_polygon_pixels(g, 6, 6);
    CHECK(m.popcount() == 36 - 4);
    CHECK_FALSE(m.get(2, 2));
    CHECK_FALSE(m.get(3, 3));
    check_against_oracle(g, 6, 6);
}

TEST_CASE("scanline fill agrees with the point-in-polygon oracle on random polygons") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> coord(-4.0, 36.0);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 3 + static_cast<int>(rng() % 7);
        std::vector<Point> pts;
        for (int i = 0; i < n; ++i) pts.push_back({coord(rng), coord(rng)});
        pts.push_back(pts.front());
        PolygonGeom g;
        g.rings.push_back(std::move(pts));
        check_against_oracle(g, 32, 32);
    }
}

TEST_CASE("degenerate and on-edge cases match the oracle") {
    SUBCASE("vertex exactly on pixel centers") {
        const auto g = closed_ring({{0.5, 0.5}, {5.5, 0.5}, {5.5, 5.5}, {0.5, 5.5}});
        check_against_oracle(g, 8, 8);
    }
    SUBCASE("collinear sliver") {
        const auto g = closed_ring({{1, 1}, {5, 1}, {5, 1}, {1, 1}});
        CHECK(rasterize_polygon_pixels(g, 8, 8).popcount() == 0);
    }
    SUBCASE("triangle crossing the grid edge") {
        const auto g = closed_ring({{-3, -3}, {9, 2}, {2, 9}});
        check_against_oracle(g, 8, 8);
    }
}

TEST_CASE("world-space rasterization maps through the geotransform") {
    const GeoTransform t{100.0, 200.0, 0.5, 0.5, 0};
    // World square of one pixel at (100..100.5, 199.5..200).
    const auto g = closed_ring({{100.0, 200.0}, {100.5, 200.0}, {100.5, 199.5}, {100.0, 199.5}});
    const BitMask m = rasterize_polygon(g, t, 4, 4);
    CHECK(m.popcount() == 1);
    CHECK(m.get(0, 0));
}

TEST_CASE("polygon_area on the spec shapes") {
    CHECK(polygon_area(closed_ring({{0, 0}, {1, 0}, {1, 1}, {0, 1}})) == doctest::Approx(1.0));

    SUBCASE("square with a centered hole, checked by fine-grid counting") {
        PolygonGeom g = closed_ring({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
        g.rings.push_back({{0.25, 0.25}, {0.75, 0.25}, {0.75, 0.75}, {0.25, 0.75}, {0.25, 0.25}});
        const double area = polygon_area(g);
        CHECK(area == doctest::Approx(0.75));

        // Rasterize on a 1/1000 grid and count: the polygon spans the unit
        // square, so scale coordinates up by 1000.
        PolygonGeom big;
        for (const auto& ring : g.rings) {
            std::vector<Point> r2;
            for (const auto& p : ring) r2.push_back({p.x * 1000.0, p.y * 1000.0});
            big.rings.push_back(std::move(r2));
        }
        const auto counted = rasterize_polygon_pixels(big, 1000, 1000).popcount();
        CHECK(area == doctest::Approx(counted / 1e6).epsilon(2e-3));
    }

    SUBCASE("collinear ring has zero area") {
        CHECK(polygon_area(closed_ring({{0, 0}, {2, 2}, {4, 4}})) == 0.0);
    }
}
