#include "lotscan/polygon.hpp"

#include <cmath>
#include <cstddef>

#include "lotscan/rasterize.hpp"

namespace lotscan {

double ring_signed_area(const std::vector<Point>& ring) {
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i)
        sum += ring[i].x * ring[i + 1].y - ring[i + 1].x * ring[i].y;
    return 0.5 * sum;
}

double polygon_area(const PolygonGeom& g) {
    // Classify holes by containment depth, so the result does not depend on
    // stored winding. A ring nested inside an odd number of others subtracts.
    double total = 0.0;
    for (std::size_t i = 0; i < g.rings.size(); ++i) {
        const auto& ring = g.rings[i];
        if (ring.empty()) continue;
        int depth = 0;
        for (std::size_t j = 0; j < g.rings.size(); ++j) {
            if (j == i) continue;
            PolygonGeom other;
            other.rings.push_back(g.rings[j]);
            if (point_in_polygon(other, ring[0].x, ring[0].y)) ++depth;
        }
        const double a = std::abs(ring_signed_area(ring));
        total += (depth % 2 == 0) ? a : -a;
    }
    return std::abs(total);
}

} // namespace lotscan
