#pragma once
#include <cstdint>
#include <vector>

namespace lotscan {

// Dense binary instance mask, row-major.
struct BitMask {
    std::int64_t width = 0;
    std::int64_t height = 0;
    std::vector<std::uint8_t> bits; // width * height entries, 0 or 1

    BitMask() = default;
    BitMask(std::int64_t w, std::int64_t h)
        : width(w), height(h), bits(static_cast<std::size_t>(w) * h, 0) {}

    [[nodiscard]] bool get(std::int64_t col, std::int64_t row) const {
        return bits[static_cast<std::size_t>(row) * width + col] != 0;
    }
    void set(std::int64_t col, std::int64_t row, bool v = true) {
        bits[static_cast<std::size_t>(row) * width + col] = v ? 1 : 0;
    }
    [[nodiscard]] std::int64_t popcount() const {
        std::int64_t n = 0;
        for (auto b : bits) n += b;
        return n;
    }

    friend bool operator==(const BitMask&, const BitMask&) = default;
};

} // namespace lotscan
