#pragma once
#include <cstdint>

#include "lotscan/bitmask.hpp"
#include "lotscan/geotransform.hpp"
#include "lotscan/polygon.hpp"

namespace lotscan {

// Scanline even-odd fill over a w x h pixel grid: a pixel is set iff its
// center (col+0.5, row+0.5) lies inside the polygon, holes excluded.
// Polygon coordinates are in pixel space.
BitMask rasterize_polygon_pixels(const PolygonGeom& g, std::int64_t w, std::int64_t h);

// Same fill for a polygon in world coordinates, mapped through t first.
BitMask rasterize_polygon(const PolygonGeom& g, const GeoTransform& t, std::int64_t w,
                          std::int64_t h);

// Even-odd point-in-polygon test, consistent with the rasterizer's pixel
// center rule.
bool point_in_polygon(const PolygonGeom& g, double x, double y);

} // namespace lotscan
