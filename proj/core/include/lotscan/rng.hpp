#pragma once
#include <cstdint>
#include <string_view>

namespace lotscan {

// Counter-style splitmix64 stream. Streams keyed by (seed, substream) are
// independent of each other and of evaluation order, which is what makes
// parallel augmentation deterministic.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool next_bool() { return (next_u64() & 1) != 0; }

private:
    std::uint64_t state_;
};

inline std::uint64_t hash_string(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ull; // FNV-1a
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

inline SplitMix64 substream(std::uint64_t seed, std::string_view name, std::uint64_t index) {
    return SplitMix64(seed ^ (hash_string(name) * 0x9E3779B97F4A7C15ull) ^ (index + 1));
}

} // namespace lotscan
