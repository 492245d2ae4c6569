#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "lotscan/errors.hpp"
#include "lotscan/rle.hpp"

using namespace lotscan;

namespace {

BitMask random_mask(std::mt19937_64& rng, std::int64_t max_dim = 12) {
    const auto w = static_cast<std::int64_t>(1 + rng() % max_dim);
    const auto h = static_cast<std::int64_t>(1 + rng() % max_dim);
    BitMask m(w, h);
    // Mix sparse and blobby masks so runs of both parities appear.
    const bool blobby = rng() % 2 == 0;
    for (auto& b : m.bits) b = blobby ? (rng() % 4 != 0) : (rng() % 4 == 0);
    return m;
}

} // namespace

TEST_CASE("all-zero 3x3 encodes to a single run") {
    const RleMask r = rle_encode(BitMask(3, 3));
    CHECK(r.counts == std::vector<std::int64_t>{9});
    CHECK(mask_area(r) == 0);
}

TEST_CASE("all-one 2x2 encodes to an empty zero run then 4") {
    BitMask m(2, 2);
    std::fill(m.bits.begin(), m.bits.end(), 1);
    const RleMask r = rle_encode(m);
    CHECK(r.counts == std::vector<std::int64_t>{0, 4});
    CHECK(mask_area(r) == 4);
}

TEST_CASE("encoding is column-major") {
    // 3x2 mask with only (col=1, row=0) set: column-major index is 2.
    BitMask m(3, 2);
    m.set(1, 0);
    const RleMask r = rle_encode(m);
    CHECK(r.counts == std::vector<std::int64_t>{2, 1, 3});
}

TEST_CASE("decode(encode(m)) == m on 1000 random masks") {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 1000; ++i) {
        const BitMask m = random_mask(rng);
        const RleMask r = rle_encode(m);
        CHECK(rle_decode(r) == m);
        CHECK(mask_area(r) == m.popcount());
    }
}

TEST_CASE("mask_area sums the odd runs") {
    RleMask r;
    r.width = 3;
    r.height = 3;
    r.counts = {3, 5, 1};
    CHECK(mask_area(r) == 5);
    // Cross-check via decode.
    CHECK(rle_decode(r).popcount() == 5);
}

TEST_CASE("inconsistent counts are rejected") {
    RleMask r;
    r.width = 2;
    r.height = 2;
    r.counts = {3, 5};
    try {
        rle_decode(r);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == errc::consistency);
    }
}

TEST_CASE("run-level intersection and union match the dense oracle") {
    std::mt19937_64 rng(41);
    for (int i = 0; i < 300; ++i) {
        const auto w = static_cast<std::int64_t>(1 + rng() % 10);
        const auto h = static_cast<std::int64_t>(1 + rng() % 10);
        BitMask a(w, h), b(w, h);
        for (auto& v : a.bits) v = rng() % 3 == 0;
        for (auto& v : b.bits) v = rng() % 2 == 0;

        std::int64_t inter = 0, uni = 0;
        for (std::size_t k = 0; k < a.bits.size(); ++k) {
            inter += (a.bits[k] && b.bits[k]) ? 1 : 0;
            uni += (a.bits[k] || b.bits[k]) ? 1 : 0;
        }
        CHECK(rle_intersection_area(rle_encode(a), rle_encode(b)) == inter);
        CHECK(rle_union_area(rle_encode(a), rle_encode(b)) == uni);
    }
}

TEST_CASE("json serialization round trips") {
    std::mt19937_64 rng(4);
    const BitMask m = random_mask(rng);
    const RleMask r = rle_encode(m);
    CHECK(rle_from_json(rle_to_json(r)) == r);
}

TEST_CASE("json schema violations") {
    try {
        rle_from_json("{\"counts\":[1]}");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == errc::schema);
    }
    try {
        rle_from_json("{\"size\":[2,2],\"counts\":[1,1]}");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == errc::consistency);
    }
}
