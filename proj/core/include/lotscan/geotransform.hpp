#pragma once
#include <cstdint>

namespace lotscan {

// Affine link between pixel (col,row) and world (x,y) coordinates for a
// north-up raster: x grows with col, y shrinks with row. Pixel sizes are
// stored positive; the downward y step is implicit.
struct GeoTransform {
    double origin_x = 0.0;     // world x of the top-left corner of pixel (0,0)
    double origin_y = 0.0;     // world y of the top-left corner of pixel (0,0)
    double pixel_size_x = 1.0; // world units per pixel, > 0
    double pixel_size_y = 1.0; // world units per pixel, > 0
    std::int32_t crs_code = 0; // EPSG-style identifier, 0 = unknown

    friend bool operator==(const GeoTransform&, const GeoTransform&) = default;
};

struct PixelXY {
    double col = 0.0;
    double row = 0.0;
};

struct WorldXY {
    double x = 0.0;
    double y = 0.0;
};

inline PixelXY world_to_pixel(const GeoTransform& t, double x, double y) {
    return {(x - t.origin_x) / t.pixel_size_x, (t.origin_y - y) / t.pixel_size_y};
}

inline WorldXY pixel_to_world(const GeoTransform& t, double col, double row) {
    return {t.origin_x + col * t.pixel_size_x, t.origin_y - row * t.pixel_size_y};
}

} // namespace lotscan
