#include "lotscan/rle.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

#include "lotscan/errors.hpp"

namespace lotscan {
namespace {

void validate(const RleMask& r) {
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < r.counts.size(); ++i) {
        const auto c = r.counts[i];
        if (c < 0) fail(errc::consistency, "negative run length");
        if (c == 0 && i != 0) fail(errc::consistency, "only the leading 0-run may be empty");
        sum += c;
    }
    if (sum != r.width * r.height)
        fail(errc::consistency, "run lengths sum to " + std::to_string(sum) + ", expected " +
                                    std::to_string(r.width * r.height));
}

} // namespace

RleMask rle_encode(const BitMask& m) {
    RleMask out;
    out.width = m.width;
    out.height = m.height;
    std::uint8_t current = 0;
    std::int64_t run = 0;
    for (std::int64_t col = 0; col < m.width; ++col) {
        for (std::int64_t row = 0; row < m.height; ++row) {
            const std::uint8_t v = m.bits[static_cast<std::size_t>(row) * m.width + col];
            if (v == current) {
                ++run;
            } else {
                out.counts.push_back(run);
                current = v;
                run = 1;
            }
        }
    }
    if (run > 0 || out.counts.empty()) out.counts.push_back(run);
    return out;
}

BitMask rle_decode(const RleMask& r) {
    validate(r);
    BitMask out(r.width, r.height);
    std::int64_t pos = 0;
    std::uint8_t value = 0;
    for (const auto c : r.counts) {
        if (value) {
            for (std::int64_t k = 0; k < c; ++k) {
                const std::int64_t col = (pos + k) / r.height;
                const std::int64_t row = (pos + k) % r.height;
                out.bits[static_cast<std::size_t>(row) * r.width + col] = 1;
            }
        }
        pos += c;
        value ^= 1;
    }
    return out;
}

std::int64_t mask_area(const RleMask& r) {
    std::int64_t area = 0;
    for (std::size_t i = 1; i < r.counts.size(); i += 2) area += r.counts[i];
    return area;
}

namespace {

// Walks two run lists in lockstep, invoking fn(overlap_len, a_set, b_set)
// for every maximal segment on which both masks are constant.
template <typename Fn>
void for_each_overlap(const RleMask& a, const RleMask& b, Fn&& fn) {
    if (a.width != b.width || a.height != b.height)
        fail(errc::precondition, "mask dimensions differ");
    std::size_t ia = 0, ib = 0;
    std::int64_t ra = ia < a.counts.size() ? a.counts[ia] : 0;
    std::int64_t rb = ib < b.counts.size() ? b.counts[ib] : 0;
    bool va = false, vb = false;
    std::int64_t remaining = a.width * a.height;
    while (remaining > 0) {
        while (ra == 0 && ia + 1 < a.counts.size()) { ++ia; ra = a.counts[ia]; va = !va; }
        while (rb == 0 && ib + 1 < b.counts.size()) { ++ib; rb = b.counts[ib]; vb = !vb; }
        const std::int64_t step = std::min({ra, rb, remaining});
        if (step <= 0) fail(errc::consistency, "run lengths undershoot the mask size");
        fn(step, va, vb);
        ra -= step;
        rb -= step;
        remaining -= step;
    }
}

} // namespace

std::int64_t rle_intersection_area(const RleMask& a, const RleMask& b) {
    std::int64_t inter = 0;
    for_each_overlap(a, b, [&](std::int64_t n, bool va, bool vb) {
        if (va && vb) inter += n;
    });
    return inter;
}

std::int64_t rle_union_area(const RleMask& a, const RleMask& b) {
    std::int64_t uni = 0;
    for_each_overlap(a, b, [&](std::int64_t n, bool va, bool vb) {
        if (va || vb) uni += n;
    });
    return uni;
}

std::string rle_to_json(const RleMask& r) {
    nlohmann::json j;
    j["size"] = {r.height, r.width};
    j["counts"] = r.counts;
    return j.dump();
}

RleMask rle_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        fail(errc::schema, std::string("bad RLE document: ") + e.what());
    }
    if (!j.contains("size") || !j["size"].is_array() || j["size"].size() != 2 ||
        !j.contains("counts") || !j["counts"].is_array())
        fail(errc::schema, "RLE document needs size:[h,w] and counts:[...]");
    RleMask r;
    r.height = j["size"][0].get<std::int64_t>();
    r.width = j["size"][1].get<std::int64_t>();
    r.counts = j["counts"].get<std::vector<std::int64_t>>();
    validate(r);
    return r;
}

} // namespace lotscan
