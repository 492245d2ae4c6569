#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "lotscan/errors.hpp"
#include "lotscan/raster.hpp"

using namespace lotscan;

namespace {

GeoRaster filled(std::int64_t w, std::int64_t h, std::uint8_t value, double ox, double oy,
                 double px = 1.0, std::int32_t crs = 100) {
    GeoRaster r = make_raster(w, h, 3, GeoTransform{ox, oy, px, px, crs});
    std::fill(r.pixels.begin(), r.pixels.end(), value);
    return r;
}

} // namespace

TEST_CASE("mosaic of one raster is a bit-identical copy") {
    GeoRaster r = filled(3, 2, 0, 10.0, 20.0);
    for (std::size_t i = 0; i < r.pixels.size(); ++i) r.pixels[i] = static_cast<std::uint8_t>(i);
    const GeoRaster m = mosaic({r});
    CHECK(m.pixels == r.pixels);
    CHECK(m.transform == r.transform);
    CHECK(m.width == r.width);
    CHECK(m.height == r.height);
}

TEST_CASE("two adjacent tiles stitch into one row") {
    // Right tile starts exactly where the left one ends.
    const GeoRaster left = filled(2, 2, 10, 0.0, 2.0);
    const GeoRaster right = filled(2, 2, 20, 2.0, 2.0);
    const GeoRaster m = mosaic({left, right});
    REQUIRE(m.width == 4);
    REQUIRE(m.height == 2);
    // Direct placement oracle: offset arithmetic per input.
    for (std::int64_t y = 0; y < 2; ++y)
        for (std::int64_t x = 0; x < 4; ++x)
            CHECK(m.at(x, y, 0) == (x < 2 ? 10 : 20));
}

TEST_CASE("identical extents: the last raster wins") {
    const GeoRaster a = filled(2, 2, 1, 0.0, 2.0);
    const GeoRaster b = filled(2, 2, 2, 0.0, 2.0);
    const GeoRaster m = mosaic({a, b});
    CHECK(m.pixels == b.pixels);
}

TEST_CASE("mosaic is idempotent") {
    const GeoRaster a = filled(2, 2, 1, 0.0, 4.0);
    const GeoRaster b = filled(3, 3, 2, 2.0, 3.0);
    const GeoRaster m = mosaic({a, b});
    const GeoRaster mm = mosaic({m});
    CHECK(mm.pixels == m.pixels);
    CHECK(mm.transform == m.transform);
}

TEST_CASE("pixel provenance: last cover wins everywhere, background elsewhere") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<GeoRaster> inputs;
        const int n = 1 + static_cast<int>(rng() % 3);
        for (int i = 0; i < n; ++i) {
            const auto w = static_cast<std::int64_t>(1 + rng() % 5);
            const auto h = static_cast<std::int64_t>(1 + rng() % 5);
            const double ox = static_cast<double>(rng() % 8);
            const double oy = static_cast<double>(8 + rng() % 8);
            GeoRaster r = filled(w, h, 0, ox, oy);
            for (auto& p : r.pixels) p = static_cast<std::uint8_t>(rng());
            inputs.push_back(std::move(r));
        }
        const GeoRaster m = mosaic(inputs);

        // Exhaustive scan: each output pixel equals the value of the last
        // input covering it, or (0,0,0).
        for (std::int64_t y = 0; y < m.height; ++y) {
            for (std::int64_t x = 0; x < m.width; ++x) {
                const auto world = pixel_to_world(m.transform, x + 0.5, y + 0.5);
                int covering = -1;
                std::int64_t sc = 0, sr = 0;
                for (int i = 0; i < n; ++i) {
                    const auto p = world_to_pixel(inputs[i].transform, world.x, world.y);
                    const auto c = static_cast<std::int64_t>(std::floor(p.col));
                    const auto r2 = static_cast<std::int64_t>(std::floor(p.row));
                    if (c >= 0 && r2 >= 0 && c < inputs[i].width && r2 < inputs[i].height) {
                        covering = i;
                        sc = c;
                        sr = r2;
                    }
                }
                for (int b = 0; b < 3; ++b) {
                    const std::uint8_t expect =
                        covering >= 0 ? inputs[covering].at(sc, sr, b) : 0;
                    if (m.at(x, y, b) != expect) REQUIRE(m.at(x, y, b) == expect);
                }
            }
        }
    }
}

TEST_CASE("mosaic of nothing is a precondition error") {
    try {
        mosaic({});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == errc::precondition);
    }
}

TEST_CASE("incompatible grids are rejected") {
    const GeoRaster a = filled(2, 2, 1, 0.0, 2.0, 1.0, 100);

    SUBCASE("pixel size mismatch") {
        const GeoRaster b = filled(2, 2, 2, 0.0, 2.0, 0.5, 100);
        try {
            mosaic({a, b});
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.code() == errc::incompatible_grid);
        }
    }
    SUBCASE("crs mismatch") {
        const GeoRaster b = filled(2, 2, 2, 0.0, 2.0, 1.0, 200);
        try {
            mosaic({a, b});
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.code() == errc::incompatible_grid);
        }
    }
    SUBCASE("misaligned origins") {
        const GeoRaster b = filled(2, 2, 2, 0.4, 2.0, 1.0, 100);
        try {
            mosaic({a, b});
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.code() == errc::alignment);
        }
    }
}

TEST_CASE("read_window basics") {
    GeoRaster r = make_raster(4, 4, 3, GeoTransform{100.0, 200.0, 0.5, 0.5, 0});
    for (std::size_t i = 0; i < r.pixels.size(); ++i) r.pixels[i] = static_cast<std::uint8_t>(i);

    SUBCASE("full extent returns the raster unchanged") {
        const GeoRaster w = read_window(r, 0, 0, 4, 4);
        CHECK(w.pixels == r.pixels);
        CHECK(w.transform == r.transform);
    }
    SUBCASE("interior window shifts the origin") {
        const GeoRaster w = read_window(r, 1, 1, 2, 2);
        CHECK(w.width == 2);
        CHECK(w.height == 2);
        CHECK(w.transform.origin_x == doctest::Approx(100.5));
        CHECK(w.transform.origin_y == doctest::Approx(199.5));
        // Manual index arithmetic.
        for (std::int64_t y = 0; y < 2; ++y)
            for (std::int64_t x = 0; x < 2; ++x)
                for (int b = 0; b < 3; ++b) CHECK(w.at(x, y, b) == r.at(x + 1, y + 1, b));
    }
    SUBCASE("overhanging request is clipped") {
        const GeoRaster w = read_window(r, 2, 2, 10, 10);
        CHECK(w.width == 2);
        CHECK(w.height == 2);
    }
    SUBCASE("negative-origin request is clipped") {
        const GeoRaster w = read_window(r, -3, -3, 5, 5);
        CHECK(w.width == 2);
        CHECK(w.height == 2);
        CHECK(w.transform.origin_x == 100.0);
    }
    SUBCASE("disjoint window is an error") {
        try {
            read_window(r, 10, 10, 2, 2);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.code() == errc::empty_window);
        }
    }
}
