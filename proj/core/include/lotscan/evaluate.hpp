#pragma once
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lotscan/bbox.hpp"
#include "lotscan/dataset.hpp"
#include "lotscan/detections_io.hpp"
#include "lotscan/rle.hpp"

namespace lotscan {

enum class IouKind { box, mask };

struct EvalConfig {
    std::vector<double> iou_thresholds = default_thresholds();
    double small_area_max = 32.0 * 32.0;   // exclusive upper bound of "small"
    double medium_area_max = 96.0 * 96.0;  // exclusive upper bound of "medium"
    IouKind iou_kind = IouKind::box;
    std::size_t max_dets_per_image = 100;

    static std::vector<double> default_thresholds() {
        std::vector<double> t;
        for (int i = 0; i < 10; ++i) t.push_back(0.5 + 0.05 * i);
        return t;
    }
};

struct GroundTruthInstance {
    std::string label;
    BBox bbox;
    std::optional<RleMask> mask;
};

struct GroundTruthImage {
    std::string image_id;
    std::vector<GroundTruthInstance> instances;
};

using GroundTruth = std::vector<GroundTruthImage>;

// Image ids are the dataset image file stems. Masks are loaded from disk
// only when asked for (box-only evaluation skips the I/O).
GroundTruth ground_truth_from_dataset(const Dataset& ds, bool load_masks);

// Greedy per-image matching: detections in descending score order each claim
// the unmatched same-class ground truth with the highest IoU at or above the
// threshold. Indices refer to the input vectors; -1 marks unmatched.
struct ImageMatching {
    std::vector<int> det_to_gt;
    std::vector<int> gt_to_det;
};

ImageMatching match_detections(const std::vector<GroundTruthInstance>& gt,
                               const std::vector<Detection>& det, double iou_threshold,
                               IouKind kind);

// One pooled detection outcome; `order` is the detection-file position used
// to break score ties deterministically.
struct ScoredOutcome {
    double score = 0.0;
    std::size_t order = 0;
    bool true_positive = false;
};

// Cumulative precision/recall over the pooled, score-sorted detections with
// the monotone (non-increasing) precision envelope applied. total_gt == 0
// flags the curve undefined.
struct PrCurve {
    std::vector<double> recall;
    std::vector<double> precision;
    std::int64_t total_gt = 0;
};

PrCurve precision_recall_curve(std::vector<ScoredOutcome> pooled, std::int64_t total_gt);

// 101-point interpolated average precision (recall grid 0.00..1.00); an
// undefined curve yields nullopt.
std::optional<double> average_precision(const PrCurve& curve);

struct MetricSet {
    std::optional<double> ap, ap50, ap75, ap_small, ap_medium, ap_large;
};

struct EvalSummary {
    std::vector<std::pair<std::string, MetricSet>> per_class;
    MetricSet overall; // macro-average over classes with defined values
};

// Full six-metric report: AP averaged over the threshold sweep, AP50/AP75 at
// the fixed thresholds, and size-bucket APs with ground truth and detections
// restricted COCO-style (a detection matched to an out-of-bucket truth is
// set aside rather than counted as a false positive). The ground truth
// defines the image universe; detections naming unknown images are not
// scored.
EvalSummary evaluate(const GroundTruth& gt, const std::vector<Detection>& detections,
                     const EvalConfig& cfg);

std::string summary_to_json(const std::vector<std::pair<std::string, EvalSummary>>& by_attribute);

// Aligned-column table, one row per (attribute, class) plus overall rows.
std::string render_summary_table(
    const std::vector<std::pair<std::string, EvalSummary>>& by_attribute);

} // namespace lotscan
