#pragma once
#include <bit>
#include <cstdint>
#include <cstring>
#include <span>

#include "lotscan/errors.hpp"

namespace lotscan::detail {

inline std::uint16_t bswap16(std::uint16_t v) { return __builtin_bswap16(v); }
inline std::uint32_t bswap32(std::uint32_t v) { return __builtin_bswap32(v); }
inline std::uint64_t bswap64(std::uint64_t v) { return __builtin_bswap64(v); }

// Bounds-checked cursor over immutable bytes with selectable endianness.
class ByteReader {
public:
    ByteReader(std::span<const std::uint8_t> bytes, bool big_endian)
        : bytes_(bytes), big_endian_(big_endian) {}

    [[nodiscard]] std::size_t size() const { return bytes_.size(); }
    [[nodiscard]] bool big_endian() const { return big_endian_; }

    [[nodiscard]] std::uint8_t u8(std::size_t off) const {
        check(off, 1);
        return bytes_[off];
    }
    [[nodiscard]] std::uint16_t u16(std::size_t off) const {
        check(off, 2);
        std::uint16_t v;
        std::memcpy(&v, bytes_.data() + off, 2);
        return needs_swap() ? bswap16(v) : v;
    }
    [[nodiscard]] std::uint32_t u32(std::size_t off) const {
        check(off, 4);
        std::uint32_t v;
        std::memcpy(&v, bytes_.data() + off, 4);
        return needs_swap() ? bswap32(v) : v;
    }
    [[nodiscard]] double f64(std::size_t off) const {
        check(off, 8);
        std::uint64_t v;
        std::memcpy(&v, bytes_.data() + off, 8);
        if (needs_swap()) v = bswap64(v);
        return std::bit_cast<double>(v);
    }
    [[nodiscard]] std::span<const std::uint8_t> raw(std::size_t off, std::size_t len) const {
        check(off, len);
        return bytes_.subspan(off, len);
    }

private:
    [[nodiscard]] bool needs_swap() const {
        return big_endian_ == (std::endian::native == std::endian::little);
    }
    void check(std::size_t off, std::size_t len) const {
        if (off + len > bytes_.size() || off + len < off)
            fail(errc::format, "read past end of file");
    }

    std::span<const std::uint8_t> bytes_;
    bool big_endian_;
};

// Append-only byte buffer with selectable endianness.
class ByteWriter {
public:
    explicit ByteWriter(bool big_endian) : big_endian_(big_endian) {}

    void u8(std::uint8_t v) { out_.push_back(v); }
    void u16(std::uint16_t v) {
        if (needs_swap()) v = bswap16(v);
        append(&v, 2);
    }
    void u32(std::uint32_t v) {
        if (needs_swap()) v = bswap32(v);
        append(&v, 4);
    }
    void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
    void f64(double d) {
        auto v = std::bit_cast<std::uint64_t>(d);
        if (needs_swap()) v = bswap64(v);
        append(&v, 8);
    }
    void bytes(std::span<const std::uint8_t> b) { append(b.data(), b.size()); }

    void patch_u32(std::size_t off, std::uint32_t v) {
        if (needs_swap()) v = bswap32(v);
        std::memcpy(out_.data() + off, &v, 4);
    }

    [[nodiscard]] std::size_t size() const { return out_.size(); }
    [[nodiscard]] const std::vector<std::uint8_t>& data() const { return out_; }
    std::vector<std::uint8_t> take() { return std::move(out_); }

private:
    [[nodiscard]] bool needs_swap() const {
        return big_endian_ == (std::endian::native == std::endian::little);
    }
    void append(const void* p, std::size_t n) {
        const auto* b = static_cast<const std::uint8_t*>(p);
        out_.insert(out_.end(), b, b + n);
    }

    std::vector<std::uint8_t> out_;
    bool big_endian_;
};

} // namespace lotscan::detail
