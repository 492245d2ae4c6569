#pragma once
#include <vector>

namespace lotscan {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

// Polygon as a list of closed rings (first point repeated last). After
// parsing, outer rings wind clockwise and holes counter-clockwise.
struct PolygonGeom {
    std::vector<std::vector<Point>> rings;

    friend bool operator==(const PolygonGeom&, const PolygonGeom&) = default;
};

// Signed shoelace area of one ring; positive for counter-clockwise winding
// in a y-up coordinate system.
double ring_signed_area(const std::vector<Point>& ring);

// Area enclosed by the polygon: outer rings contribute positively, holes
// negatively, independent of stored winding. Returns the absolute value.
double polygon_area(const PolygonGeom& g);

} // namespace lotscan
