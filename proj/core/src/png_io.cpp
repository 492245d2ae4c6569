#include "lotscan/png_io.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>
#include <string>

#include "lotscan/detail/byteio.hpp"
#include "lotscan/errors.hpp"

namespace lotscan {
namespace {

constexpr std::uint8_t png_signature[8] = {137, 80, 78, 71, 13, 10, 26, 10};

void write_chunk(detail::ByteWriter& w, const char type[4],
                 std::span<const std::uint8_t> payload) {
    w.u32(static_cast<std::uint32_t>(payload.size()));
    const std::size_t crc_start = w.size();
    w.bytes({reinterpret_cast<const std::uint8_t*>(type), 4});
    w.bytes(payload);
    const std::uint32_t crc = static_cast<std::uint32_t>(
        crc32(0, w.data().data() + crc_start, static_cast<uInt>(4 + payload.size())));
    w.u32(crc);
}

std::vector<std::uint8_t> deflate_bytes(std::span<const std::uint8_t> raw) {
    uLongf bound = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> out(bound);
    if (compress2(out.data(), &bound, raw.data(), static_cast<uLong>(raw.size()),
                  Z_BEST_SPEED) != Z_OK)
        fail(errc::io, "zlib compression failed");
    out.resize(bound);
    return out;
}

std::vector<std::uint8_t> inflate_bytes(std::span<const std::uint8_t> src,
                                        std::size_t expected) {
    std::vector<std::uint8_t> out(expected);
    uLongf dest_len = expected;
    if (uncompress(out.data(), &dest_len, src.data(), static_cast<uLong>(src.size())) != Z_OK)
        fail(errc::format, "PNG image data stream is corrupt");
    if (dest_len != expected) fail(errc::format, "PNG image data has the wrong length");
    return out;
}

std::uint8_t paeth(int a, int b, int c) {
    const int p = a + b - c;
    const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return static_cast<std::uint8_t>(a);
    if (pb <= pc) return static_cast<std::uint8_t>(b);
    return static_cast<std::uint8_t>(c);
}

void unfilter_row(std::uint8_t filter, std::uint8_t* row, const std::uint8_t* prev,
                  std::size_t len, std::size_t bpp) {
    switch (filter) {
        case 0: break;
        case 1: // Sub
            for (std::size_t i = bpp; i < len; ++i) row[i] += row[i - bpp];
            break;
        case 2: // Up
            if (prev)
                for (std::size_t i = 0; i < len; ++i) row[i] += prev[i];
            break;
        case 3: // Average
            for (std::size_t i = 0; i < len; ++i) {
                const int left = i >= bpp ? row[i - bpp] : 0;
                const int up = prev ? prev[i] : 0;
                row[i] = static_cast<std::uint8_t>(row[i] + (left + up) / 2);
            }
            break;
        case 4: // Paeth
            for (std::size_t i = 0; i < len; ++i) {
                const int left = i >= bpp ? row[i - bpp] : 0;
                const int up = prev ? prev[i] : 0;
                const int upleft = (prev && i >= bpp) ? prev[i - bpp] : 0;
                row[i] += paeth(left, up, upleft);
            }
            break;
        default: fail(errc::format, "unknown PNG filter type " + std::to_string(filter));
    }
}

} // namespace

std::vector<std::uint8_t> encode_png(const GeoRaster& r) {
    if (r.band_count != 3)
        fail(errc::precondition,
             "PNG export needs a 3-band raster, got " + std::to_string(r.band_count));

    detail::ByteWriter w(/*big_endian=*/true);
    w.bytes(png_signature);

    detail::ByteWriter ihdr(true);
    ihdr.u32(static_cast<std::uint32_t>(r.width));
    ihdr.u32(static_cast<std::uint32_t>(r.height));
    ihdr.u8(8); // bit depth
    ihdr.u8(2); // color type: truecolor
    ihdr.u8(0); // compression
    ihdr.u8(0); // filter method
    ihdr.u8(0); // interlace: none
    write_chunk(w, "IHDR", ihdr.data());

    // Filter type 0 on every scanline keeps the byte stream trivially
    // auditable; zlib still shrinks typical orthoimagery well enough.
    const std::size_t stride = static_cast<std::size_t>(r.width) * 3;
    std::vector<std::uint8_t> raw((stride + 1) * r.height);
    for (std::int64_t y = 0; y < r.height; ++y) {
        raw[y * (stride + 1)] = 0;
        std::memcpy(raw.data() + y * (stride + 1) + 1, r.pixels.data() + y * stride, stride);
    }
    write_chunk(w, "IDAT", deflate_bytes(raw));
    write_chunk(w, "IEND", {});
    return w.take();
}

void write_png(const GeoRaster& r, const std::filesystem::path& path) {
    const auto bytes = encode_png(r);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(errc::io, "cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(errc::io, "short write to " + path.string());
}

GeoRaster decode_png(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 8 || std::memcmp(bytes.data(), png_signature, 8) != 0)
        fail(errc::format, "missing PNG signature");
    detail::ByteReader r(bytes, /*big_endian=*/true);

    std::uint32_t width = 0, height = 0;
    int channels = 0;
    std::uint8_t color_type = 0;
    std::vector<std::uint8_t> palette;
    std::vector<std::uint8_t> idat;

    std::size_t off = 8;
    bool saw_ihdr = false, saw_iend = false;
    while (off + 8 <= bytes.size() && !saw_iend) {
        const std::uint32_t len = r.u32(off);
        const auto type = r.raw(off + 4, 4);
        const auto payload = r.raw(off + 8, len);
        if (std::memcmp(type.data(), "IHDR", 4) == 0) {
            width = r.u32(off + 8);
            height = r.u32(off + 12);
            const std::uint8_t depth = r.u8(off + 16);
            color_type = r.u8(off + 17);
            const std::uint8_t interlace = r.u8(off + 20);
            if (depth != 8) fail(errc::unsupported_feature, "only 8-bit PNGs supported");
            if (interlace != 0) fail(errc::unsupported_feature, "interlaced PNGs unsupported");
            switch (color_type) {
                case 0: channels = 1; break;
                case 2: channels = 3; break;
                case 3: channels = 1; break;
                case 4: channels = 2; break;
                case 6: channels = 4; break;
                default: fail(errc::format, "bad PNG color type");
            }
            saw_ihdr = true;
        } else if (std::memcmp(type.data(), "PLTE", 4) == 0) {
            palette.assign(payload.begin(), payload.end());
        } else if (std::memcmp(type.data(), "IDAT", 4) == 0) {
            idat.insert(idat.end(), payload.begin(), payload.end());
        } else if (std::memcmp(type.data(), "IEND", 4) == 0) {
            saw_iend = true;
        }
        off += 12 + static_cast<std::size_t>(len);
    }
    if (!saw_ihdr || width == 0 || height == 0) fail(errc::format, "PNG lacks a valid IHDR");
    if (idat.empty()) fail(errc::format, "PNG lacks image data");

    const std::size_t stride = static_cast<std::size_t>(width) * channels;
    auto raw = inflate_bytes(idat, (stride + 1) * height);

    GeoRaster out = make_raster(width, height, 3, GeoTransform{});
    std::vector<std::uint8_t> prev;
    for (std::uint32_t y = 0; y < height; ++y) {
        std::uint8_t* row = raw.data() + y * (stride + 1) + 1;
        unfilter_row(raw[y * (stride + 1)], row, y ? prev.data() : nullptr, stride, channels);
        prev.assign(row, row + stride);
        for (std::uint32_t x = 0; x < width; ++x) {
            std::uint8_t rgb[3];
            switch (color_type) {
                case 0: rgb[0] = rgb[1] = rgb[2] = row[x]; break;
                case 2: std::memcpy(rgb, row + x * 3, 3); break;
                case 3: {
                    const std::size_t idx = static_cast<std::size_t>(row[x]) * 3;
                    if (idx + 2 >= palette.size()) fail(errc::format, "palette index out of range");
                    std::memcpy(rgb, palette.data() + idx, 3);
                    break;
                }
                case 4: rgb[0] = rgb[1] = rgb[2] = row[x * 2]; break;
                case 6: std::memcpy(rgb, row + x * 4, 3); break;
            }
            std::memcpy(out.pixels.data() + (static_cast<std::size_t>(y) * width + x) * 3, rgb, 3);
        }
    }
    return out;
}

GeoRaster load_png(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(errc::io, "cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return decode_png(bytes);
}

} // namespace lotscan
