#pragma once
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "lotscan/raster.hpp"

namespace lotscan {

// Writes a 3-band raster as an 8-bit RGB PNG (no alpha). Pixel values
// survive a write/read cycle bit-exactly.
void write_png(const GeoRaster& r, const std::filesystem::path& path);

std::vector<std::uint8_t> encode_png(const GeoRaster& r);

// Reads non-interlaced 8-bit PNGs (gray, gray+alpha, RGB, RGBA, palette) and
// returns a 3-band raster with an identity transform; alpha is dropped.
GeoRaster decode_png(std::span<const std::uint8_t> bytes);

GeoRaster load_png(const std::filesystem::path& path);

} // namespace lotscan
