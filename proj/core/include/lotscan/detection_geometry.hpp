#pragma once
#include <cstdint>
#include <optional>
#include <vector>

#include "lotscan/bbox.hpp"
#include "lotscan/rle.hpp"

namespace lotscan {

// Anchor grid defaults follow the detector configuration this pipeline
// assumes: 3 scales x 3 aspect ratios = 9 anchors per feature-map location.
struct AnchorConfig {
    std::vector<double> scales{128.0, 256.0, 512.0};
    std::vector<double> aspect_ratios{0.5, 1.0, 2.0}; // width:height
    double stride = 16.0;                             // image pixels per feature cell
};

struct Proposal {
    double center_x = 0.0;
    double center_y = 0.0;
    double width = 0.0;
    double height = 0.0;
    double objectness = 0.0;

    [[nodiscard]] BBox box() const {
        return {center_x - width / 2.0, center_y - height / 2.0, center_x + width / 2.0,
                center_y + height / 2.0};
    }
};

// Dense real-valued feature tensor with the stride tying feature cells back
// to image pixels. Values are channel-major.
struct FeatureMap {
    int channels = 0;
    std::int64_t height = 0;
    std::int64_t width = 0;
    double stride = 1.0;
    std::vector<float> values;

    [[nodiscard]] float at(int c, std::int64_t row, std::int64_t col) const {
        return values[(static_cast<std::size_t>(c) * height + row) * width + col];
    }
    float& at(int c, std::int64_t row, std::int64_t col) {
        return values[(static_cast<std::size_t>(c) * height + row) * width + col];
    }
};

FeatureMap make_feature_map(int channels, std::int64_t height, std::int64_t width,
                            double stride = 1.0);

// One anchor per (row, col, scale, ratio), centered at
// ((col+0.5)*stride, (row+0.5)*stride) with width s*sqrt(r), height
// s/sqrt(r) so every ratio preserves the scale's area. Anchors may extend
// past the image; nothing clips them here.
std::vector<BBox> generate_anchors(const AnchorConfig& cfg, std::int64_t fm_width,
                                   std::int64_t fm_height);

double iou_box(const BBox& a, const BBox& b);
double iou_mask(const RleMask& a, const RleMask& b);

// Greedy NMS over (box, score) pairs: repeatedly keep the highest-scoring
// candidate (ties break toward the lower original index) and discard
// everything overlapping it with IoU > threshold. Returns original indices
// in kept order.
std::vector<std::size_t> nms(const std::vector<BBox>& boxes, const std::vector<double>& scores,
                             double iou_threshold);

inline constexpr std::size_t default_pre_nms_top_k = 15000;
inline constexpr double default_nms_iou_threshold = 0.5;

// Sort by objectness, keep the top pre_nms_top_k, run NMS, then optionally
// cap the survivors.
std::vector<Proposal> select_proposals(const std::vector<Proposal>& proposals,
                                       std::size_t pre_nms_top_k = default_pre_nms_top_k,
                                       double iou_threshold = default_nms_iou_threshold,
                                       std::optional<std::size_t> post_nms_cap = std::nullopt);

inline constexpr std::int64_t default_roi_output_size = 32;

// Quantized RoI pooling: the roi (image coordinates) is floored onto feature
// cells, split into out_h x out_w integer bins, and each non-empty bin takes
// its max. Empty bins read 0.
FeatureMap roi_pool(const FeatureMap& fm, const BBox& roi,
                    std::int64_t out_w = default_roi_output_size,
                    std::int64_t out_h = default_roi_output_size);

// Quantization-free counterpart: each output bin averages bilinear samples
// taken at regularly spaced points inside the bin, zero-padded outside the
// feature map. Output moves continuously under sub-cell roi shifts.
FeatureMap roi_align(const FeatureMap& fm, const BBox& roi,
                     std::int64_t out_w = default_roi_output_size,
                     std::int64_t out_h = default_roi_output_size, int samples_per_bin_axis = 2);

// Pyramid level for a roi: clamp(k0 + floor(log2(sqrt(area)/canonical)),
// k_min, k_max).
int fpn_assign_level(const BBox& roi, int k0 = 4, double canonical = 224.0, int k_min = 2,
                     int k_max = 5);

} // namespace lotscan
