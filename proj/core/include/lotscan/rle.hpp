#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "lotscan/bitmask.hpp"

namespace lotscan {

// Column-major run-length encoded binary mask. counts alternate runs of 0s
// and 1s over the column-major scan and always start with the 0-run (which
// may be empty). sum(counts) == width * height.
struct RleMask {
    std::int64_t width = 0;
    std::int64_t height = 0;
    std::vector<std::int64_t> counts;

    friend bool operator==(const RleMask&, const RleMask&) = default;
};

RleMask rle_encode(const BitMask& m);
BitMask rle_decode(const RleMask& r);

// Number of set pixels: the sum of the 1-runs.
std::int64_t mask_area(const RleMask& r);

// Run-level overlap counts; neither mask is decoded.
std::int64_t rle_intersection_area(const RleMask& a, const RleMask& b);
std::int64_t rle_union_area(const RleMask& a, const RleMask& b);

// Serialized form used in dataset files: {"size":[h,w],"counts":[...]}.
std::string rle_to_json(const RleMask& r);
RleMask rle_from_json(const std::string& text);

} // namespace lotscan
