#pragma once
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lotscan/bbox.hpp"
#include "lotscan/rle.hpp"

namespace lotscan {

// The pipeline's exchange unit: what a detector (or a hand-written fixture)
// claims about one instance in one image.
struct Detection {
    std::string image_id;
    std::string label;
    double score = 0.0;
    BBox bbox;
    std::optional<RleMask> rle;
};

// JSON-lines interchange, one object per line:
//   {"image_id":..., "label":..., "score":..., "bbox":[x0,y0,x1,y1],
//    "rle":{"size":[h,w],"counts":[...]}}   (rle optional)
// Parse errors report 1-based line numbers.
std::vector<Detection> parse_detections_jsonl(const std::string& text);

std::vector<Detection> load_detections(const std::filesystem::path& path);

std::string detections_to_jsonl(const std::vector<Detection>& detections);

void save_detections(const std::vector<Detection>& detections,
                     const std::filesystem::path& path);

} // namespace lotscan
