#include "lotscan/geotiff.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>
#include <string>

#include "lotscan/detail/byteio.hpp"
#include "lotscan/errors.hpp"

namespace lotscan {
namespace {

using detail::ByteReader;

// Baseline + extension tags this subset understands.
enum : std::uint16_t {
    tag_image_width = 256,
    tag_image_length = 257,
    tag_bits_per_sample = 258,
    tag_compression = 259,
    tag_strip_offsets = 273,
    tag_samples_per_pixel = 277,
    tag_rows_per_strip = 278,
    tag_strip_byte_counts = 279,
    tag_planar_config = 284,
    tag_predictor = 317,
    tag_tile_width = 322,
    tag_tile_length = 323,
    tag_tile_offsets = 324,
    tag_tile_byte_counts = 325,
    tag_model_pixel_scale = 33550,
    tag_model_tiepoint = 33922,
    tag_geo_key_directory = 34735,
};

enum : std::uint16_t {
    compression_none = 1,
    compression_adobe_deflate = 8,
    compression_deflate = 32946,
};

std::size_t type_size(std::uint16_t type) {
    switch (type) {
        case 1: case 2: case 6: case 7: return 1; // BYTE, ASCII, SBYTE, UNDEFINED
        case 3: case 8: return 2;                 // SHORT, SSHORT
        case 4: case 9: case 11: return 4;        // LONG, SLONG, FLOAT
        case 5: case 10: case 12: return 8;       // RATIONAL, SRATIONAL, DOUBLE
        default: return 0;
    }
}

struct IfdEntry {
    std::uint16_t type = 0;
    std::uint32_t count = 0;
    std::size_t value_offset = 0; // resolved: where the payload bytes live
    bool present = false;
};

struct Ifd {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::uint16_t samples_per_pixel = 1;
    std::uint16_t compression = compression_none;
    std::uint16_t planar_config = 1;
    std::uint16_t predictor = 1;
    std::uint32_t rows_per_strip = 0xFFFFFFFFu;
    std::uint32_t tile_width = 0;
    std::uint32_t tile_length = 0;
    std::vector<std::uint16_t> bits_per_sample;
    std::vector<std::uint32_t> chunk_offsets;     // strip or tile offsets
    std::vector<std::uint32_t> chunk_byte_counts; // strip or tile byte counts
    bool tiled = false;
    IfdEntry pixel_scale;
    IfdEntry tiepoint;
    IfdEntry geo_keys;
};

std::uint32_t scalar_value(const ByteReader& r, std::size_t entry_off) {
    const auto type = r.u16(entry_off + 2);
    if (type == 3) return r.u16(entry_off + 8);
    if (type == 4) return r.u32(entry_off + 8);
    if (type == 1) return r.u8(entry_off + 8);
    fail(errc::format, "unexpected type " + std::to_string(type) + " for scalar tag");
}

std::vector<std::uint32_t> value_array(const ByteReader& r, std::size_t entry_off) {
    const auto type = r.u16(entry_off + 2);
    const auto count = r.u32(entry_off + 4);
    const std::size_t elem = type_size(type);
    if (elem == 0 || (type != 3 && type != 4))
        fail(errc::format, "unexpected element type in offset/count tag");
    const std::size_t total = elem * count;
    const std::size_t base = total <= 4 ? entry_off + 8 : r.u32(entry_off + 8);
    std::vector<std::uint32_t> out(count);
    for (std::uint32_t i = 0; i < count; ++i)
        out[i] = (type == 3) ? r.u16(base + 2 * i) : r.u32(base + 4 * i);
    return out;
}

std::vector<double> double_array(const ByteReader& r, const IfdEntry& e) {
    if (e.type != 12) fail(errc::format, "geo tag is not of DOUBLE type");
    std::vector<double> out(e.count);
    for (std::uint32_t i = 0; i < e.count; ++i) out[i] = r.f64(e.value_offset + 8 * i);
    return out;
}

std::vector<std::uint16_t> short_array(const ByteReader& r, const IfdEntry& e) {
    if (e.type != 3) fail(errc::format, "geo key directory is not of SHORT type");
    std::vector<std::uint16_t> out(e.count);
    for (std::uint32_t i = 0; i < e.count; ++i) out[i] = r.u16(e.value_offset + 2 * i);
    return out;
}

IfdEntry capture_entry(const ByteReader& r, std::size_t entry_off) {
    IfdEntry e;
    e.type = r.u16(entry_off + 2);
    e.count = r.u32(entry_off + 4);
    const std::size_t total = type_size(e.type) * e.count;
    e.value_offset = total <= 4 ? entry_off + 8 : r.u32(entry_off + 8);
    e.present = true;
    return e;
}

Ifd parse_ifd(const ByteReader& r, std::size_t ifd_off) {
    Ifd ifd;
    const auto entry_count = r.u16(ifd_off);
    for (std::uint16_t i = 0; i < entry_count; ++i) {
        const std::size_t e = ifd_off + 2 + static_cast<std::size_t>(i) * 12;
        switch (r.u16(e)) {
            case tag_image_width:       ifd.width = scalar_value(r, e); break;
            case tag_image_length:      ifd.height = scalar_value(r, e); break;
            case tag_samples_per_pixel: ifd.samples_per_pixel = static_cast<std::uint16_t>(scalar_value(r, e)); break;
            case tag_compression:       ifd.compression = static_cast<std::uint16_t>(scalar_value(r, e)); break;
            case tag_planar_config:     ifd.planar_config = static_cast<std::uint16_t>(scalar_value(r, e)); break;
            case tag_predictor:         ifd.predictor = static_cast<std::uint16_t>(scalar_value(r, e)); break;
            case tag_rows_per_strip:    ifd.rows_per_strip = scalar_value(r, e); break;
            case tag_tile_width:        ifd.tile_width = scalar_value(r, e); break;
            case tag_tile_length:       ifd.tile_length = scalar_value(r, e); break;
            case tag_bits_per_sample: {
                for (auto v : value_array(r, e))
                    ifd.bits_per_sample.push_back(static_cast<std::uint16_t>(v));
                break;
            }
            case tag_strip_offsets:     ifd.chunk_offsets = value_array(r, e); break;
            case tag_strip_byte_counts: ifd.chunk_byte_counts = value_array(r, e); break;
            case tag_tile_offsets:
                ifd.chunk_offsets = value_array(r, e);
                ifd.tiled = true;
                break;
            case tag_tile_byte_counts:
                ifd.chunk_byte_counts = value_array(r, e);
                ifd.tiled = true;
                break;
            case tag_model_pixel_scale:   ifd.pixel_scale = capture_entry(r, e); break;
            case tag_model_tiepoint:      ifd.tiepoint = capture_entry(r, e); break;
            case tag_geo_key_directory:   ifd.geo_keys = capture_entry(r, e); break;
            default: break; // unknown tags are skipped
        }
    }
    return ifd;
}

std::vector<std::uint8_t> inflate_chunk(std::span<const std::uint8_t> src,
                                        std::size_t expected_size) {
    std::vector<std::uint8_t> out(expected_size);
    uLongf dest_len = expected_size;
    const int rc = uncompress(out.data(), &dest_len, src.data(), src.size());
    if (rc != Z_OK)
        fail(errc::format, "deflate stream is corrupt (zlib rc " + std::to_string(rc) + ")");
    out.resize(dest_len);
    return out;
}

// Predictor 2: each sample is stored as the difference from the sample one
// pixel to its left, per band.
void undo_horizontal_predictor(std::uint8_t* row, std::size_t width, std::size_t spp) {
    for (std::size_t col = 1; col < width; ++col)
        for (std::size_t b = 0; b < spp; ++b)
            row[col * spp + b] = static_cast<std::uint8_t>(row[col * spp + b] + row[(col - 1) * spp + b]);
}

std::int32_t crs_from_geo_keys(const std::vector<std::uint16_t>& keys) {
    if (keys.size() < 4) return 0;
    const std::size_t num_keys = keys[3];
    std::int32_t geographic = 0;
    for (std::size_t k = 0; k < num_keys; ++k) {
        const std::size_t base = 4 + 4 * k;
        if (base + 3 >= keys.size()) break;
        const std::uint16_t key_id = keys[base];
        const std::uint16_t location = keys[base + 1];
        const std::uint16_t value = keys[base + 3];
        if (location != 0) continue; // value lives in another tag; outside subset
        if (key_id == 3072) return value; // projected CRS wins
        if (key_id == 2048) geographic = value;
    }
    return geographic;
}

GeoTransform transform_from_geo_tags(const ByteReader& r, const Ifd& ifd) {
    if (!ifd.pixel_scale.present)
        fail(errc::georeferencing, "missing ModelPixelScale tag (33550)");
    if (!ifd.tiepoint.present)
        fail(errc::georeferencing, "missing ModelTiepoint tag (33922)");

    const auto scale = double_array(r, ifd.pixel_scale);
    if (scale.size() < 2 || scale[0] <= 0.0 || scale[1] <= 0.0)
        fail(errc::georeferencing, "ModelPixelScale must hold positive x/y sizes");

    const auto tie = double_array(r, ifd.tiepoint);
    if (tie.size() < 6)
        fail(errc::georeferencing, "ModelTiepoint must hold at least one i,j,k,x,y,z tuple");

    GeoTransform t;
    t.pixel_size_x = scale[0];
    t.pixel_size_y = scale[1];
    // Tiepoint anchors raster point (i,j) at world (x,y); shift back to (0,0).
    t.origin_x = tie[3] - tie[0] * scale[0];
    t.origin_y = tie[4] + tie[1] * scale[1];
    if (ifd.geo_keys.present) t.crs_code = crs_from_geo_keys(short_array(r, ifd.geo_keys));
    return t;
}

void validate_subset(const Ifd& ifd) {
    if (ifd.width == 0 || ifd.height == 0)
        fail(errc::format, "image dimensions missing or zero");
    if (ifd.samples_per_pixel == 0)
        fail(errc::format, "SamplesPerPixel is zero");
    if (ifd.width > (1u << 30) || ifd.height > (1u << 30))
        fail(errc::format, "image dimensions are implausibly large");
    if (ifd.bits_per_sample.empty())
        fail(errc::unsupported_feature,
             "BitsPerSample tag missing (TIFF defaults to 1-bit, outside this subset)");
    for (auto b : ifd.bits_per_sample)
        if (b != 8)
            fail(errc::unsupported_feature,
                 "only 8 bits per sample supported, found " + std::to_string(b));
    if (ifd.compression != compression_none &&
        ifd.compression != compression_adobe_deflate &&
        ifd.compression != compression_deflate)
        fail(errc::unsupported_feature,
             "unsupported compression " + std::to_string(ifd.compression));
    if (ifd.planar_config != 1)
        fail(errc::unsupported_feature, "planar (non-interleaved) sample layout unsupported");
    if (ifd.predictor != 1 && ifd.predictor != 2)
        fail(errc::unsupported_feature, "unsupported predictor " + std::to_string(ifd.predictor));
    if (ifd.chunk_offsets.empty())
        fail(errc::format, "no strip or tile offsets present");
    if (ifd.chunk_offsets.size() != ifd.chunk_byte_counts.size())
        fail(errc::format, "strip/tile offset and byte-count arrays disagree");
    if (ifd.tiled && (ifd.tile_width == 0 || ifd.tile_length == 0))
        fail(errc::format, "tiled layout missing tile dimensions");
}

std::vector<std::uint8_t> decode_chunk(const ByteReader& r, const Ifd& ifd, std::size_t index,
                                       std::size_t expected_size) {
    const auto src = r.raw(ifd.chunk_offsets[index], ifd.chunk_byte_counts[index]);
    if (ifd.compression == compression_none) {
        if (src.size() < expected_size)
            fail(errc::format, "strip/tile holds fewer bytes than its pixel area needs");
        return {src.begin(), src.begin() + static_cast<std::ptrdiff_t>(expected_size)};
    }
    auto out = inflate_chunk(src, expected_size);
    if (out.size() != expected_size)
        fail(errc::format, "decompressed strip/tile size mismatch");
    return out;
}

void read_strips(const ByteReader& r, const Ifd& ifd, std::vector<std::uint8_t>& dense) {
    const std::size_t spp = ifd.samples_per_pixel;
    const std::size_t row_bytes = static_cast<std::size_t>(ifd.width) * spp;
    if (ifd.rows_per_strip == 0) fail(errc::format, "RowsPerStrip is zero");
    const std::uint32_t rps = std::min<std::uint64_t>(ifd.rows_per_strip, ifd.height);
    const std::size_t strip_count = (ifd.height + rps - 1) / rps;
    if (strip_count != ifd.chunk_offsets.size())
        fail(errc::format, "strip count does not match RowsPerStrip");

    for (std::size_t s = 0; s < strip_count; ++s) {
        const std::size_t row0 = s * rps;
        const std::size_t rows = std::min<std::size_t>(rps, ifd.height - row0);
        auto chunk = decode_chunk(r, ifd, s, rows * row_bytes);
        for (std::size_t y = 0; y < rows; ++y) {
            std::uint8_t* dst = dense.data() + (row0 + y) * row_bytes;
            std::memcpy(dst, chunk.data() + y * row_bytes, row_bytes);
            if (ifd.predictor == 2) undo_horizontal_predictor(dst, ifd.width, spp);
        }
    }
}

void read_tiles(const ByteReader& r, const Ifd& ifd, std::vector<std::uint8_t>& dense) {
    const std::size_t spp = ifd.samples_per_pixel;
    const std::size_t row_bytes = static_cast<std::size_t>(ifd.width) * spp;
    const std::size_t tiles_across = (ifd.width + ifd.tile_width - 1) / ifd.tile_width;
    const std::size_t tiles_down = (ifd.height + ifd.tile_length - 1) / ifd.tile_length;
    if (tiles_across * tiles_down != ifd.chunk_offsets.size())
        fail(errc::format, "tile count does not match tile grid");

    const std::size_t tile_row_bytes = static_cast<std::size_t>(ifd.tile_width) * spp;
    for (std::size_t ty = 0; ty < tiles_down; ++ty) {
        for (std::size_t tx = 0; tx < tiles_across; ++tx) {
            auto chunk = decode_chunk(r, ifd, ty * tiles_across + tx,
                                      tile_row_bytes * ifd.tile_length);
            const std::size_t cols =
                std::min<std::size_t>(ifd.tile_width, ifd.width - tx * ifd.tile_width);
            const std::size_t rows =
                std::min<std::size_t>(ifd.tile_length, ifd.height - ty * ifd.tile_length);
            for (std::size_t y = 0; y < rows; ++y) {
                std::uint8_t* src = chunk.data() + y * tile_row_bytes;
                if (ifd.predictor == 2) undo_horizontal_predictor(src, ifd.tile_width, spp);
                std::memcpy(dense.data() + (ty * ifd.tile_length + y) * row_bytes +
                                tx * ifd.tile_width * spp,
                            src, cols * spp);
            }
        }
    }
}

} // namespace

GeoRaster parse_geotiff(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 8) fail(errc::format, "file too short for a TIFF header");
    bool big_endian;
    if (bytes[0] == 'I' && bytes[1] == 'I') big_endian = false;
    else if (bytes[0] == 'M' && bytes[1] == 'M') big_endian = true;
    else fail(errc::format, "bad byte-order mark, expected II or MM");

    ByteReader r(bytes, big_endian);
    if (r.u16(2) != 42) fail(errc::format, "bad TIFF magic number");
    const std::uint32_t ifd_off = r.u32(4);
    if (ifd_off < 8) fail(errc::format, "IFD offset points into the header");

    const Ifd ifd = parse_ifd(r, ifd_off);
    validate_subset(ifd);
    const GeoTransform transform = transform_from_geo_tags(r, ifd);

    const std::size_t spp = ifd.samples_per_pixel;
    std::vector<std::uint8_t> dense(static_cast<std::size_t>(ifd.width) * ifd.height * spp);
    if (ifd.tiled) read_tiles(r, ifd, dense);
    else read_strips(r, ifd, dense);

    const int kept = static_cast<int>(std::min<std::size_t>(spp, 3));
    GeoRaster out = make_raster(ifd.width, ifd.height, kept, transform);
    if (kept == static_cast<int>(spp)) {
        out.pixels = std::move(dense);
    } else {
        const std::size_t n = static_cast<std::size_t>(ifd.width) * ifd.height;
        for (std::size_t p = 0; p < n; ++p)
            for (int b = 0; b < kept; ++b)
                out.pixels[p * kept + b] = dense[p * spp + b];
    }
    return out;
}

GeoRaster load_geotiff(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(errc::io, "cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return parse_geotiff(bytes);
}

namespace {

std::vector<std::uint8_t> deflate_strip(std::span<const std::uint8_t> raw) {
    uLongf bound = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> out(bound);
    if (compress2(out.data(), &bound, raw.data(), static_cast<uLong>(raw.size()),
                  Z_DEFAULT_COMPRESSION) != Z_OK)
        fail(errc::io, "zlib compression failed");
    out.resize(bound);
    return out;
}

struct TagEntry {
    std::uint16_t tag;
    std::uint16_t type;
    std::uint32_t count;
    std::uint32_t value; // inline value or payload offset, patched later
};

} // namespace

std::vector<std::uint8_t> encode_geotiff(const GeoRaster& r, bool deflate) {
    const auto spp = static_cast<std::uint16_t>(r.band_count);
    const std::size_t row_bytes = static_cast<std::size_t>(r.width) * spp;

    // One strip per raster keeps the layout simple; Deflate still shrinks it.
    std::vector<std::uint8_t> strip;
    if (deflate) {
        strip = deflate_strip(r.pixels);
    } else {
        strip = r.pixels;
    }

    detail::ByteWriter w(/*big_endian=*/false);
    w.u8('I');
    w.u8('I');
    w.u16(42);
    const std::size_t ifd_offset_pos = w.size();
    w.u32(0); // patched to the IFD offset below

    const std::uint32_t strip_offset = static_cast<std::uint32_t>(w.size());
    w.bytes(strip);
    if (w.size() % 2) w.u8(0); // keep the IFD word-aligned

    // Out-of-line payloads written after the pixel data.
    std::uint32_t bits_offset = 0;
    if (spp > 2) {
        bits_offset = static_cast<std::uint32_t>(w.size());
        for (int i = 0; i < spp; ++i) w.u16(8);
    }
    const std::uint32_t scale_offset = static_cast<std::uint32_t>(w.size());
    w.f64(r.transform.pixel_size_x);
    w.f64(r.transform.pixel_size_y);
    w.f64(0.0);
    const std::uint32_t tie_offset = static_cast<std::uint32_t>(w.size());
    for (double v : {0.0, 0.0, 0.0, r.transform.origin_x, r.transform.origin_y, 0.0}) w.f64(v);

    std::uint32_t keys_offset = 0;
    if (r.transform.crs_code > 0 && r.transform.crs_code <= 65535) {
        keys_offset = static_cast<std::uint32_t>(w.size());
        for (std::uint16_t v : {std::uint16_t(1), std::uint16_t(1), std::uint16_t(0),
                                std::uint16_t(1), std::uint16_t(3072), std::uint16_t(0),
                                std::uint16_t(1),
                                static_cast<std::uint16_t>(r.transform.crs_code)})
            w.u16(v);
    }

    std::vector<TagEntry> tags{
        {tag_image_width, 4, 1, static_cast<std::uint32_t>(r.width)},
        {tag_image_length, 4, 1, static_cast<std::uint32_t>(r.height)},
        {tag_bits_per_sample, 3, spp, spp <= 2 ? 8u | (spp == 2 ? 8u << 16 : 0u) : bits_offset},
        {259 /*compression*/, 3, 1, deflate ? 8u : 1u},
        {262 /*photometric*/, 3, 1, spp >= 3 ? 2u : 1u},
        {tag_strip_offsets, 4, 1, strip_offset},
        {tag_samples_per_pixel, 3, 1, spp},
        {tag_rows_per_strip, 4, 1, static_cast<std::uint32_t>(r.height)},
        {tag_strip_byte_counts, 4, 1,
         static_cast<std::uint32_t>(deflate ? strip.size() : row_bytes * r.height)},
        {tag_model_pixel_scale, 12, 3, scale_offset},
        {tag_model_tiepoint, 12, 6, tie_offset},
    };
    if (keys_offset) tags.push_back({tag_geo_key_directory, 3, 8, keys_offset});
    std::sort(tags.begin(), tags.end(),
              [](const TagEntry& a, const TagEntry& b) { return a.tag < b.tag; });

    const std::uint32_t ifd_offset = static_cast<std::uint32_t>(w.size());
    w.patch_u32(ifd_offset_pos, ifd_offset);
    w.u16(static_cast<std::uint16_t>(tags.size()));
    for (const auto& t : tags) {
        w.u16(t.tag);
        w.u16(t.type);
        w.u32(t.count);
        if (t.type == 3 && t.count == 1) {
            w.u16(static_cast<std::uint16_t>(t.value));
            w.u16(0);
        } else {
            w.u32(t.value);
        }
    }
    w.u32(0); // no further IFDs
    return w.take();
}

void write_geotiff(const GeoRaster& r, const std::filesystem::path& path, bool deflate) {
    const auto bytes = encode_geotiff(r, deflate);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(errc::io, "cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(errc::io, "short write to " + path.string());
}

} // namespace lotscan
