#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "lotscan/bbox.hpp"
#include "lotscan/bitmask.hpp"
#include "lotscan/polygon.hpp"

namespace lotscan {

// The fixed two-class vocabulary, after label normalization.
inline constexpr const char* label_parking_space = "parking_space";
inline constexpr const char* label_vehicle = "vehicle";

struct AnnotatedInstance {
    std::string label;          // "parking_space" or "vehicle"
    std::vector<Point> polygon; // image-pixel coordinates, >= 3 points
    int instance_id = 0;        // position in file order
};

struct AnnotatedImage {
    std::int64_t width = 0;
    std::int64_t height = 0;
    std::vector<AnnotatedInstance> instances;
};

// Case-folds and maps spaces to underscores ("Parking Space" ->
// "parking_space").
std::string normalize_label(const std::string& raw);

// Parses a LabelMe polygon document: shapes[].label, shapes[].points,
// imageWidth, imageHeight. Only polygon shapes are accepted; out-of-bounds
// points are clamped to the image.
AnnotatedImage parse_labelme(const std::string& json_text);

// Bounding box of the polygon's vertices (min and max in each axis).
BBox polygon_to_bbox(const std::vector<Point>& polygon);

// Pixel-center even-odd fill of the polygon in image space.
BitMask polygon_to_mask(const std::vector<Point>& polygon, std::int64_t w, std::int64_t h);

} // namespace lotscan
