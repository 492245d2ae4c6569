#include "lotscan/rasterize.hpp"

#include <algorithm>
#include <cmath>

namespace lotscan {
namespace {

// Edges are treated half-open in y (ymin inclusive, ymax exclusive) so a
// scanline through a shared vertex counts exactly once, and a crossing
// counts only when strictly right of the sample point. The scanline fill and
// point_in_polygon below implement the same rule and therefore agree on
// every pixel center.
struct Edge {
    double x1, y1, x2, y2;
};

std::vector<Edge> collect_edges(const PolygonGeom& g) {
    std::vector<Edge> edges;
    for (const auto& ring : g.rings) {
        for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
            if (ring[i].y == ring[i + 1].y) continue; // horizontal edges never cross
            edges.push_back({ring[i].x, ring[i].y, ring[i + 1].x, ring[i + 1].y});
        }
    }
    return edges;
}

} // namespace

bool point_in_polygon(const PolygonGeom& g, double x, double y) {
    bool inside = false;
    for (const auto& ring : g.rings) {
        for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
            const double y1 = ring[i].y, y2 = ring[i + 1].y;
            if ((y1 <= y) == (y2 <= y)) continue; // half-open span test
            const double xi = ring[i].x + (y - y1) * (ring[i + 1].x - ring[i].x) / (y2 - y1);
            if (xi > x) inside = !inside;
        }
    }
    return inside;
}

BitMask rasterize_polygon_pixels(const PolygonGeom& g, std::int64_t w, std::int64_t h) {
    BitMask mask(w, h);
    const auto edges = collect_edges(g);
    if (edges.empty()) return mask;

    double ymin = edges[0].y1, ymax = edges[0].y1;
    for (const auto& e : edges) {
        ymin = std::min({ymin, e.y1, e.y2});
        ymax = std::max({ymax, e.y1, e.y2});
    }
    const std::int64_t row0 = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(ymin)) - 1);
    const std::int64_t row1 = std::min<std::int64_t>(h - 1, static_cast<std::int64_t>(std::ceil(ymax)) + 1);

    std::vector<double> xs;
    for (std::int64_t row = row0; row <= row1; ++row) {
        const double py = row + 0.5;
        xs.clear();
        for (const auto& e : edges) {
            if ((e.y1 <= py) == (e.y2 <= py)) continue;
            xs.push_back(e.x1 + (py - e.y1) * (e.x2 - e.x1) / (e.y2 - e.y1));
        }
        std::sort(xs.begin(), xs.end());
        for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
            // Pixel centers in [xs[i], xs[i+1]).
            auto c0 = static_cast<std::int64_t>(std::ceil(xs[i] - 0.5));
            auto c1 = static_cast<std::int64_t>(std::ceil(xs[i + 1] - 0.5));
            c0 = std::max<std::int64_t>(c0, 0);
            c1 = std::min(c1, w);
            for (std::int64_t col = c0; col < c1; ++col) mask.set(col, row);
        }
    }
    return mask;
}

BitMask rasterize_polygon(const PolygonGeom& g, const GeoTransform& t, std::int64_t w,
                          std::int64_t h) {
    PolygonGeom pixel_space;
    pixel_space.rings.reserve(g.rings.size());
    for (const auto& ring : g.rings) {
        std::vector<Point> out;
        out.reserve(ring.size());
        for (const auto& p : ring) {
            const PixelXY px = world_to_pixel(t, p.x, p.y);
            out.push_back({px.col, px.row});
        }
        pixel_space.rings.push_back(std::move(out));
    }
    return rasterize_polygon_pixels(pixel_space, w, h);
}

} // namespace lotscan
