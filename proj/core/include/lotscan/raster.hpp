#pragma once
#include <cstdint>
#include <span>
#include <vector>

#include "lotscan/geotransform.hpp"

namespace lotscan {

// 8-bit raster with row-major, band-interleaved samples (RGBRGB... for 3
// bands) and a geotransform. Immutable by convention once built; all
// operations below return new rasters.
struct GeoRaster {
    std::int64_t width = 0;
    std::int64_t height = 0;
    int band_count = 0;
    std::vector<std::uint8_t> pixels; // width * height * band_count samples
    GeoTransform transform;

    [[nodiscard]] std::size_t sample_index(std::int64_t col, std::int64_t row, int band) const {
        return (static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
                static_cast<std::size_t>(col)) *
                   static_cast<std::size_t>(band_count) +
               static_cast<std::size_t>(band);
    }
    [[nodiscard]] std::uint8_t at(std::int64_t col, std::int64_t row, int band) const {
        return pixels[sample_index(col, row, band)];
    }
    [[nodiscard]] std::span<const std::uint8_t> row_span(std::int64_t row) const {
        const std::size_t stride = static_cast<std::size_t>(width) * band_count;
        return {pixels.data() + static_cast<std::size_t>(row) * stride, stride};
    }
};

GeoRaster make_raster(std::int64_t width, std::int64_t height, int band_count,
                      const GeoTransform& transform);

// Stitches rasters sharing pixel size and CRS onto one grid. Later inputs
// overwrite earlier ones where they overlap; uncovered pixels stay (0,0,0).
GeoRaster mosaic(const std::vector<GeoRaster>& rasters);

// Returns the intersection of the requested window with the raster, with the
// transform origin shifted accordingly. Requests reaching past the edge are
// clipped; a zero-area intersection is an error.
GeoRaster read_window(const GeoRaster& r, std::int64_t col0, std::int64_t row0,
                      std::int64_t w, std::int64_t h);

} // namespace lotscan
