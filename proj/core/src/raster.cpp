#include "lotscan/raster.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "lotscan/errors.hpp"

namespace lotscan {
namespace {

bool close_rel(double a, double b, double rel) {
    return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

// Pixel offset of raster r on the grid anchored at (min_x, max_y). Offsets
// must land on integers within tolerance or the inputs are not co-gridded.
struct GridOffset {
    std::int64_t col = 0;
    std::int64_t row = 0;
};

GridOffset grid_offset(const GeoRaster& r, double min_x, double max_y) {
    const double fcol = (r.transform.origin_x - min_x) / r.transform.pixel_size_x;
    const double frow = (max_y - r.transform.origin_y) / r.transform.pixel_size_y;
    const double rcol = std::round(fcol);
    const double rrow = std::round(frow);
    if (std::abs(fcol - rcol) > 1e-6 || std::abs(frow - rrow) > 1e-6)
        fail(errc::alignment, "raster origins are not aligned on a shared pixel grid");
    return {static_cast<std::int64_t>(rcol), static_cast<std::int64_t>(rrow)};
}

} // namespace

GeoRaster make_raster(std::int64_t width, std::int64_t height, int band_count,
                      const GeoTransform& transform) {
    if (width < 1 || height < 1 || band_count < 1)
        fail(errc::precondition, "raster dimensions and band count must be positive");
    GeoRaster r;
    r.width = width;
    r.height = height;
    r.band_count = band_count;
    r.transform = transform;
    r.pixels.assign(static_cast<std::size_t>(width) * height * band_count, 0);
    return r;
}

GeoRaster mosaic(const std::vector<GeoRaster>& rasters) {
    if (rasters.empty()) fail(errc::precondition, "mosaic needs at least one raster");

    const GeoTransform& ref = rasters.front().transform;
    for (const auto& r : rasters) {
        if (r.band_count != 3)
            fail(errc::precondition, "mosaic inputs must carry 3 bands");
        if (r.transform.crs_code != ref.crs_code)
            fail(errc::incompatible_grid,
                 "CRS mismatch: " + std::to_string(r.transform.crs_code) + " vs " +
                     std::to_string(ref.crs_code));
        if (!close_rel(r.transform.pixel_size_x, ref.pixel_size_x, 1e-9) ||
            !close_rel(r.transform.pixel_size_y, ref.pixel_size_y, 1e-9))
            fail(errc::incompatible_grid, "pixel size mismatch between mosaic inputs");
    }

    double min_x = ref.origin_x, max_y = ref.origin_y;
    double max_x = ref.origin_x, min_y = ref.origin_y;
    for (const auto& r : rasters) {
        min_x = std::min(min_x, r.transform.origin_x);
        max_y = std::max(max_y, r.transform.origin_y);
        max_x = std::max(max_x, r.transform.origin_x + r.width * r.transform.pixel_size_x);
        min_y = std::min(min_y, r.transform.origin_y - r.height * r.transform.pixel_size_y);
    }

    GeoTransform out_t = ref;
    out_t.origin_x = min_x;
    out_t.origin_y = max_y;
    const auto out_w = static_cast<std::int64_t>(std::llround((max_x - min_x) / ref.pixel_size_x));
    const auto out_h = static_cast<std::int64_t>(std::llround((max_y - min_y) / ref.pixel_size_y));
    GeoRaster out = make_raster(out_w, out_h, 3, out_t);

    // Later inputs overwrite earlier ones row by row.
    for (const auto& r : rasters) {
        const GridOffset off = grid_offset(r, min_x, max_y);
        const std::size_t src_stride = static_cast<std::size_t>(r.width) * 3;
        const std::size_t dst_stride = static_cast<std::size_t>(out.width) * 3;
        for (std::int64_t y = 0; y < r.height; ++y) {
            std::memcpy(out.pixels.data() + (off.row + y) * dst_stride + off.col * 3,
                        r.pixels.data() + y * src_stride, src_stride);
        }
    }
    return out;
}

GeoRaster read_window(const GeoRaster& r, std::int64_t col0, std::int64_t row0,
                      std::int64_t w, std::int64_t h) {
    const std::int64_t c0 = std::max<std::int64_t>(col0, 0);
    const std::int64_t r0 = std::max<std::int64_t>(row0, 0);
    const std::int64_t c1 = std::min(col0 + w, r.width);
    const std::int64_t r1 = std::min(row0 + h, r.height);
    if (c0 >= c1 || r0 >= r1)
        fail(errc::empty_window, "window does not intersect the raster");

    GeoTransform t = r.transform;
    t.origin_x += c0 * t.pixel_size_x;
    t.origin_y -= r0 * t.pixel_size_y;

    GeoRaster out = make_raster(c1 - c0, r1 - r0, r.band_count, t);
    const std::size_t src_stride = static_cast<std::size_t>(r.width) * r.band_count;
    const std::size_t dst_stride = static_cast<std::size_t>(out.width) * r.band_count;
    for (std::int64_t y = r0; y < r1; ++y) {
        std::memcpy(out.pixels.data() + (y - r0) * dst_stride,
                    r.pixels.data() + y * src_stride + c0 * r.band_count, dst_stride);
    }
    return out;
}

} // namespace lotscan
