#include "lotscan/detection_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lotscan/errors.hpp"

namespace lotscan {

FeatureMap make_feature_map(int channels, std::int64_t height, std::int64_t width,
                            double stride) {
    if (channels < 1 || height < 1 || width < 1 || stride < 1.0)
        fail(errc::precondition, "feature map dimensions and stride must be positive");
    FeatureMap fm;
    fm.channels = channels;
    fm.height = height;
    fm.width = width;
    fm.stride = stride;
    fm.values.assign(static_cast<std::size_t>(channels) * height * width, 0.0f);
    return fm;
}

std::vector<BBox> generate_anchors(const AnchorConfig& cfg, std::int64_t fm_width,
                                   std::int64_t fm_height) {
    if (cfg.scales.empty() || cfg.aspect_ratios.empty())
        fail(errc::precondition, "anchor scales and ratios must be non-empty");
    for (double s : cfg.scales)
        if (s <= 0) fail(errc::precondition, "anchor scales must be positive");
    for (double r : cfg.aspect_ratios)
        if (r <= 0) fail(errc::precondition, "anchor ratios must be positive");

    std::vector<BBox> anchors;
    anchors.reserve(static_cast<std::size_t>(fm_width * fm_height) * cfg.scales.size() *
                    cfg.aspect_ratios.size());
    for (std::int64_t row = 0; row < fm_height; ++row) {
        for (std::int64_t col = 0; col < fm_width; ++col) {
            const double cx = (static_cast<double>(col) + 0.5) * cfg.stride;
            const double cy = (static_cast<double>(row) + 0.5) * cfg.stride;
            for (double s : cfg.scales) {
                for (double r : cfg.aspect_ratios) {
                    const double w = s * std::sqrt(r);
                    const double h = s / std::sqrt(r);
                    anchors.push_back({cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2});
                }
            }
        }
    }
    return anchors;
}

double iou_box(const BBox& a, const BBox& b) {
    const double inter = intersection_area(a, b);
    const double uni = a.area() + b.area() - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

double iou_mask(const RleMask& a, const RleMask& b) {
    if (a.width != b.width || a.height != b.height)
        fail(errc::precondition, "mask IoU needs equal dimensions");
    const std::int64_t inter = rle_intersection_area(a, b);
    const std::int64_t uni = mask_area(a) + mask_area(b) - inter;
    return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

std::vector<std::size_t> nms(const std::vector<BBox>& boxes, const std::vector<double>& scores,
                             double iou_threshold) {
    if (boxes.size() != scores.size())
        fail(errc::precondition, "boxes and scores must pair up");
    if (!(iou_threshold > 0.0 && iou_threshold <= 1.0))
        fail(errc::precondition, "NMS threshold must lie in (0, 1]");

    std::vector<std::size_t> order(boxes.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores[a] > scores[b]; // stable: equal scores keep file order
    });

    std::vector<std::size_t> kept;
    std::vector<bool> suppressed(boxes.size(), false);
    for (std::size_t oi = 0; oi < order.size(); ++oi) {
        const std::size_t i = order[oi];
        if (suppressed[i]) continue;
        kept.push_back(i);
        for (std::size_t oj = oi + 1; oj < order.size(); ++oj) {
            const std::size_t j = order[oj];
            if (!suppressed[j] && iou_box(boxes[i], boxes[j]) > iou_threshold)
                suppressed[j] = true;
        }
    }
    return kept;
}

std::vector<Proposal> select_proposals(const std::vector<Proposal>& proposals,
                                       std::size_t pre_nms_top_k, double iou_threshold,
                                       std::optional<std::size_t> post_nms_cap) {
    std::vector<std::size_t> order(proposals.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return proposals[a].objectness > proposals[b].objectness;
    });
    if (order.size() > pre_nms_top_k) order.resize(pre_nms_top_k);

    std::vector<BBox> boxes;
    std::vector<double> scores;
    boxes.reserve(order.size());
    for (auto i : order) {
        boxes.push_back(proposals[i].box());
        scores.push_back(proposals[i].objectness);
    }

    std::vector<Proposal> out;
    for (auto k : nms(boxes, scores, iou_threshold)) {
        out.push_back(proposals[order[k]]);
        if (post_nms_cap && out.size() == *post_nms_cap) break;
    }
    return out;
}

namespace {

struct CellRect {
    std::int64_t col0, row0, col1, row1; // half-open feature-cell window
};

CellRect quantize_roi(const FeatureMap& fm, const BBox& roi) {
    const double x0 = roi.x_min / fm.stride;
    const double y0 = roi.y_min / fm.stride;
    const double x1 = roi.x_max / fm.stride;
    const double y1 = roi.y_max / fm.stride;
    CellRect rect{static_cast<std::int64_t>(std::floor(x0)),
                  static_cast<std::int64_t>(std::floor(y0)),
                  static_cast<std::int64_t>(std::ceil(x1)),
                  static_cast<std::int64_t>(std::ceil(y1))};
    rect.col0 = std::max<std::int64_t>(rect.col0, 0);
    rect.row0 = std::max<std::int64_t>(rect.row0, 0);
    rect.col1 = std::min(rect.col1, fm.width);
    rect.row1 = std::min(rect.row1, fm.height);
    return rect;
}

float bilinear_sample(const FeatureMap& fm, int c, double x, double y) {
    // Cell (i,j) carries its value at center (j+0.5, i+0.5); outside reads 0.
    const double u = x - 0.5;
    const double v = y - 0.5;
    const auto x0 = static_cast<std::int64_t>(std::floor(u));
    const auto y0 = static_cast<std::int64_t>(std::floor(v));
    const double fx = u - static_cast<double>(x0);
    const double fy = v - static_cast<double>(y0);
    const auto cell = [&](std::int64_t col, std::int64_t row) -> double {
        if (col < 0 || row < 0 || col >= fm.width || row >= fm.height) return 0.0;
        return fm.at(c, row, col);
    };
    const double top = (1.0 - fx) * cell(x0, y0) + fx * cell(x0 + 1, y0);
    const double bot = (1.0 - fx) * cell(x0, y0 + 1) + fx * cell(x0 + 1, y0 + 1);
    return static_cast<float>((1.0 - fy) * top + fy * bot);
}

} // namespace

FeatureMap roi_pool(const FeatureMap& fm, const BBox& roi, std::int64_t out_w,
                    std::int64_t out_h) {
    const CellRect rect = quantize_roi(fm, roi);
    if (rect.col0 >= rect.col1 || rect.row0 >= rect.row1)
        fail(errc::empty_window, "roi does not intersect the feature map");

    const std::int64_t w = rect.col1 - rect.col0;
    const std::int64_t h = rect.row1 - rect.row0;
    FeatureMap out = make_feature_map(fm.channels, out_h, out_w);
    for (int c = 0; c < fm.channels; ++c) {
        for (std::int64_t ph = 0; ph < out_h; ++ph) {
            const std::int64_t r0 = rect.row0 + (h * ph) / out_h;
            const std::int64_t r1 = rect.row0 + (h * (ph + 1)) / out_h;
            for (std::int64_t pw = 0; pw < out_w; ++pw) {
                const std::int64_t c0 = rect.col0 + (w * pw) / out_w;
                const std::int64_t c1 = rect.col0 + (w * (pw + 1)) / out_w;
                float best = 0.0f; // empty bins stay 0
                bool any = false;
                for (std::int64_t row = r0; row < r1; ++row)
                    for (std::int64_t col = c0; col < c1; ++col) {
                        const float v = fm.at(c, row, col);
                        best = any ? std::max(best, v) : v;
                        any = true;
                    }
                out.at(c, ph, pw) = any ? best : 0.0f;
            }
        }
    }
    return out;
}

FeatureMap roi_align(const FeatureMap& fm, const BBox& roi, std::int64_t out_w,
                     std::int64_t out_h, int samples_per_bin_axis) {
    if (roi.width() <= 0.0 || roi.height() <= 0.0)
        fail(errc::precondition, "roi_align needs a positive-area roi");
    if (samples_per_bin_axis < 1)
        fail(errc::precondition, "samples_per_bin_axis must be at least 1");

    const double x0 = roi.x_min / fm.stride;
    const double y0 = roi.y_min / fm.stride;
    const double bin_w = (roi.x_max / fm.stride - x0) / static_cast<double>(out_w);
    const double bin_h = (roi.y_max / fm.stride - y0) / static_cast<double>(out_h);
    const int n = samples_per_bin_axis;

    FeatureMap out = make_feature_map(fm.channels, out_h, out_w);
    for (int c = 0; c < fm.channels; ++c) {
        for (std::int64_t ph = 0; ph < out_h; ++ph) {
            for (std::int64_t pw = 0; pw < out_w; ++pw) {
                double sum = 0.0;
                for (int sy = 0; sy < n; ++sy) {
                    const double y = y0 + bin_h * (static_cast<double>(ph) +
                                                   (static_cast<double>(sy) + 0.5) / n);
                    for (int sx = 0; sx < n; ++sx) {
                        const double x = x0 + bin_w * (static_cast<double>(pw) +
                                                       (static_cast<double>(sx) + 0.5) / n);
                        sum += bilinear_sample(fm, c, x, y);
                    }
                }
                out.at(c, ph, pw) = static_cast<float>(sum / (n * n));
            }
        }
    }
    return out;
}

int fpn_assign_level(const BBox& roi, int k0, double canonical, int k_min, int k_max) {
    const double area = roi.area();
    if (area <= 0.0) fail(errc::precondition, "fpn level assignment needs positive roi area");
    const int k = k0 + static_cast<int>(std::floor(std::log2(std::sqrt(area) / canonical)));
    return std::clamp(k, k_min, k_max);
}

} // namespace lotscan
