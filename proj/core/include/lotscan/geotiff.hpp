#pragma once
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "lotscan/raster.hpp"

namespace lotscan {

// Parses the baseline-TIFF subset used by orthoimagery products: either byte
// order, strip or tile layout, 8 bits per sample, compression none or
// Deflate (with optional horizontal predictor), georeferenced through the
// ModelPixelScale (33550) and ModelTiepoint (33922) tags. The CRS code is
// taken from the GeoKeyDirectory (34735) when present. Bands beyond the
// third are dropped; sample values are preserved bit-exactly.
GeoRaster parse_geotiff(std::span<const std::uint8_t> bytes);

GeoRaster load_geotiff(const std::filesystem::path& path);

// Writes the same subset back out: little-endian, strip-organized, geo tags
// included, optionally Deflate-compressed. parse_geotiff(encode_geotiff(r))
// reproduces r's samples and transform exactly.
std::vector<std::uint8_t> encode_geotiff(const GeoRaster& r, bool deflate = false);

void write_geotiff(const GeoRaster& r, const std::filesystem::path& path, bool deflate = false);

} // namespace lotscan
