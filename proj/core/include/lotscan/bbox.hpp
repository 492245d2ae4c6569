#pragma once
#include <algorithm>

namespace lotscan {

// Axis-aligned box in pixel coordinates, corners inclusive of extent
// (x_max >= x_min, y_max >= y_min).
struct BBox {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;

    [[nodiscard]] double width() const { return x_max - x_min; }
    [[nodiscard]] double height() const { return y_max - y_min; }
    [[nodiscard]] double area() const { return width() * height(); }

    friend bool operator==(const BBox&, const BBox&) = default;
};

inline double intersection_area(const BBox& a, const BBox& b) {
    const double w = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
    const double h = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
    return (w > 0.0 && h > 0.0) ? w * h : 0.0;
}

} // namespace lotscan
