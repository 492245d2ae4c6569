#include "lotscan/evaluate.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "lotscan/detection_geometry.hpp"
#include "lotscan/errors.hpp"

namespace lotscan {
namespace {

double pair_iou(const GroundTruthInstance& g, const Detection& d, IouKind kind) {
    if (kind == IouKind::box) return iou_box(g.bbox, d.bbox);
    if (!g.mask) fail(errc::schema, "ground truth instance lacks a mask for mask IoU");
    if (!d.rle)
        fail(errc::schema, "detection for image lacks an rle mask but mask IoU was requested");
    return iou_mask(*g.mask, *d.rle);
}

double gt_area(const GroundTruthInstance& g, IouKind kind) {
    if (kind == IouKind::mask && g.mask) return static_cast<double>(mask_area(*g.mask));
    return g.bbox.area();
}

double det_area(const Detection& d, IouKind kind) {
    if (kind == IouKind::mask && d.rle) return static_cast<double>(mask_area(*d.rle));
    return d.bbox.area();
}

struct AreaRange {
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity(); // half-open [lo, hi)

    [[nodiscard]] bool contains(double a) const { return a >= lo && a < hi; }
};

// Outcome of one detection under one (threshold, area range) regime.
struct DetOutcome {
    double score = 0.0;
    std::size_t order = 0;
    bool matched = false;
    bool ignored = false;
};

struct BucketAccumulator {
    std::vector<DetOutcome> outcomes;
    std::int64_t counted_gt = 0;
};

// Per-image, per-class working set: score-ordered detections, their IoU
// against every same-class truth, and the areas the bucket rule needs.
struct ImageClassData {
    std::vector<double> gt_areas;
    std::vector<double> det_scores;
    std::vector<std::size_t> det_orders;
    std::vector<double> det_areas;
    std::vector<std::vector<double>> iou; // [det][gt]
};

// Matches one image's detections of one class against its ground truths,
// with out-of-range truths demoted to "ignore": they absorb detections
// without contributing to recall, mirroring the standard COCO protocol.
void match_one_image(const ImageClassData& data, double threshold, const AreaRange& range,
                     BucketAccumulator& acc) {
    const std::size_t n_gt = data.gt_areas.size();
    std::vector<bool> gt_ignored(n_gt);
    std::vector<std::size_t> gt_order(n_gt);
    for (std::size_t g = 0; g < n_gt; ++g) {
        gt_ignored[g] = !range.contains(data.gt_areas[g]);
        gt_order[g] = g;
    }
    // Real candidates first so an ignored truth never outbids a live one.
    std::stable_sort(gt_order.begin(), gt_order.end(),
                     [&](std::size_t a, std::size_t b) { return gt_ignored[a] < gt_ignored[b]; });
    for (bool ig : gt_ignored)
        if (!ig) ++acc.counted_gt;

    std::vector<bool> gt_taken(n_gt, false);
    for (std::size_t d = 0; d < data.det_scores.size(); ++d) {
        double best_iou = threshold;
        int best = -1;
        for (std::size_t oi = 0; oi < gt_order.size(); ++oi) {
            const std::size_t g = gt_order[oi];
            if (gt_taken[g]) continue;
            if (best >= 0 && !gt_ignored[static_cast<std::size_t>(best)] && gt_ignored[g])
                break; // only ignored truths remain and a live match exists
            const double iou = data.iou[d][g];
            if (iou < best_iou) continue;
            if (iou == best_iou && best >= 0) continue; // first-from-order tie break
            best_iou = iou;
            best = static_cast<int>(g);
        }
        DetOutcome outcome;
        outcome.score = data.det_scores[d];
        outcome.order = data.det_orders[d];
        if (best >= 0) {
            gt_taken[static_cast<std::size_t>(best)] = true;
            outcome.matched = true;
            outcome.ignored = gt_ignored[static_cast<std::size_t>(best)];
        } else {
            outcome.ignored = !range.contains(data.det_areas[d]);
        }
        acc.outcomes.push_back(outcome);
    }
}

std::optional<double> bucket_ap(BucketAccumulator acc) {
    if (acc.counted_gt == 0) return std::nullopt;
    std::vector<ScoredOutcome> pooled;
    pooled.reserve(acc.outcomes.size());
    for (const auto& o : acc.outcomes) {
        if (o.ignored) continue;
        pooled.push_back({o.score, o.order, o.matched});
    }
    return average_precision(precision_recall_curve(std::move(pooled), acc.counted_gt));
}

std::optional<double> mean_defined(const std::vector<std::optional<double>>& vals) {
    double sum = 0.0;
    int n = 0;
    for (const auto& v : vals)
        if (v) {
            sum += *v;
            ++n;
        }
    if (n == 0) return std::nullopt;
    return sum / n;
}

} // namespace

GroundTruth ground_truth_from_dataset(const Dataset& ds, bool load_masks) {
    GroundTruth gt;
    gt.reserve(ds.images.size());
    for (const auto& img : ds.images) {
        GroundTruthImage gimg;
        gimg.image_id = std::filesystem::path(img.image_path).stem().string();
        for (const auto& inst : img.instances) {
            GroundTruthInstance ginst;
            ginst.label = inst.label;
            ginst.bbox = inst.bbox;
            if (load_masks && !inst.mask_path.empty())
                ginst.mask = load_instance_mask(ds, inst);
            gimg.instances.push_back(std::move(ginst));
        }
        gt.push_back(std::move(gimg));
    }
    return gt;
}

ImageMatching match_detections(const std::vector<GroundTruthInstance>& gt,
                               const std::vector<Detection>& det, double iou_threshold,
                               IouKind kind) {
    ImageMatching m;
    m.det_to_gt.assign(det.size(), -1);
    m.gt_to_det.assign(gt.size(), -1);

    std::vector<std::size_t> order(det.size());
    for (std::size_t i = 0; i < det.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return det[a].score > det[b].score; });

    for (const std::size_t d : order) {
        double best_iou = iou_threshold;
        int best = -1;
        for (std::size_t g = 0; g < gt.size(); ++g) {
            if (m.gt_to_det[g] >= 0 || gt[g].label != det[d].label) continue;
            const double iou = pair_iou(gt[g], det[d], kind);
            if (iou < best_iou || (iou == best_iou && best >= 0)) continue;
            best_iou = iou;
            best = static_cast<int>(g);
        }
        if (best >= 0) {
            m.det_to_gt[d] = best;
            m.gt_to_det[static_cast<std::size_t>(best)] = static_cast<int>(d);
        }
    }
    return m;
}

PrCurve precision_recall_curve(std::vector<ScoredOutcome> pooled, std::int64_t total_gt) {
    std::sort(pooled.begin(), pooled.end(), [](const ScoredOutcome& a, const ScoredOutcome& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.order < b.order; // file order breaks ties
    });

    PrCurve curve;
    curve.total_gt = total_gt;
    if (total_gt <= 0) return curve;

    std::int64_t tp = 0, fp = 0;
    curve.recall.reserve(pooled.size());
    curve.precision.reserve(pooled.size());
    for (const auto& o : pooled) {
        o.true_positive ? ++tp : ++fp;
        curve.recall.push_back(static_cast<double>(tp) / static_cast<double>(total_gt));
        curve.precision.push_back(static_cast<double>(tp) / static_cast<double>(tp + fp));
    }
    // Monotone envelope: precision at recall r becomes the max precision at
    // any recall >= r.
    for (std::size_t i = curve.precision.size(); i-- > 1;)
        curve.precision[i - 1] = std::max(curve.precision[i - 1], curve.precision[i]);
    return curve;
}

std::optional<double> average_precision(const PrCurve& curve) {
    if (curve.total_gt <= 0) return std::nullopt;
    double sum = 0.0;
    for (int i = 0; i <= 100; ++i) {
        const double r = static_cast<double>(i) / 100.0;
        // First pooled point reaching recall r; envelope makes it the max.
        const auto it = std::lower_bound(curve.recall.begin(), curve.recall.end(), r);
        if (it != curve.recall.end())
            sum += curve.precision[static_cast<std::size_t>(it - curve.recall.begin())];
    }
    return sum / 101.0;
}

EvalSummary evaluate(const GroundTruth& gt, const std::vector<Detection>& detections,
                     const EvalConfig& cfg) {
    if (cfg.iou_thresholds.empty())
        fail(errc::precondition, "evaluation needs at least one IoU threshold");

    // Group detections per image id, keep file order, cap per image by score.
    std::map<std::string, std::vector<std::pair<const Detection*, std::size_t>>> dets_by_image;
    for (std::size_t i = 0; i < detections.size(); ++i)
        dets_by_image[detections[i].image_id].push_back({&detections[i], i});
    for (auto& [id, dets] : dets_by_image) {
        std::stable_sort(dets.begin(), dets.end(),
                         [](const auto& a, const auto& b) { return a.first->score > b.first->score; });
        if (dets.size() > cfg.max_dets_per_image) dets.resize(cfg.max_dets_per_image);
    }

    std::set<std::string> labels;
    for (const auto& img : gt)
        for (const auto& inst : img.instances) labels.insert(inst.label);
    for (const auto& d : detections) labels.insert(d.label);

    const std::vector<std::pair<std::string, AreaRange>> ranges = {
        {"all", {0.0, std::numeric_limits<double>::infinity()}},
        {"small", {0.0, cfg.small_area_max}},
        {"medium", {cfg.small_area_max, cfg.medium_area_max}},
        {"large", {cfg.medium_area_max, std::numeric_limits<double>::infinity()}},
    };

    EvalSummary summary;
    for (const auto& label : labels) {
        // IoU matrices and areas are threshold- and bucket-independent;
        // compute them once per (image, class).
        std::vector<ImageClassData> per_image;
        per_image.reserve(gt.size());
        for (const auto& img : gt) {
            ImageClassData data;
            std::vector<const GroundTruthInstance*> gts;
            for (const auto& inst : img.instances)
                if (inst.label == label) {
                    gts.push_back(&inst);
                    data.gt_areas.push_back(gt_area(inst, cfg.iou_kind));
                }
            if (auto it = dets_by_image.find(img.image_id); it != dets_by_image.end())
                for (const auto& [d, ord] : it->second)
                    if (d->label == label) {
                        data.det_scores.push_back(d->score);
                        data.det_orders.push_back(ord);
                        data.det_areas.push_back(det_area(*d, cfg.iou_kind));
                        auto& row = data.iou.emplace_back();
                        row.reserve(gts.size());
                        for (const auto* g : gts) row.push_back(pair_iou(*g, *d, cfg.iou_kind));
                    }
            per_image.push_back(std::move(data));
        }

        // ap_by[range][threshold]
        std::vector<std::vector<std::optional<double>>> ap_by(ranges.size());
        for (std::size_t ri = 0; ri < ranges.size(); ++ri) {
            for (const double thr : cfg.iou_thresholds) {
                BucketAccumulator acc;
                for (const auto& data : per_image)
                    match_one_image(data, thr, ranges[ri].second, acc);
                ap_by[ri].push_back(bucket_ap(std::move(acc)));
            }
        }

        MetricSet m;
        m.ap = mean_defined(ap_by[0]);
        for (std::size_t t = 0; t < cfg.iou_thresholds.size(); ++t) {
            if (std::abs(cfg.iou_thresholds[t] - 0.50) < 1e-9) m.ap50 = ap_by[0][t];
            if (std::abs(cfg.iou_thresholds[t] - 0.75) < 1e-9) m.ap75 = ap_by[0][t];
        }
        m.ap_small = mean_defined(ap_by[1]);
        m.ap_medium = mean_defined(ap_by[2]);
        m.ap_large = mean_defined(ap_by[3]);
        summary.per_class.emplace_back(label, m);
    }

    const auto collect = [&](auto member) {
        std::vector<std::optional<double>> vals;
        for (const auto& [name, m] : summary.per_class) vals.push_back(m.*member);
        return mean_defined(vals);
    };
    summary.overall.ap = collect(&MetricSet::ap);
    summary.overall.ap50 = collect(&MetricSet::ap50);
    summary.overall.ap75 = collect(&MetricSet::ap75);
    summary.overall.ap_small = collect(&MetricSet::ap_small);
    summary.overall.ap_medium = collect(&MetricSet::ap_medium);
    summary.overall.ap_large = collect(&MetricSet::ap_large);
    return summary;
}

namespace {

nlohmann::json metric_json(const MetricSet& m) {
    const auto opt = [](const std::optional<double>& v) {
        return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
    };
    return {{"ap", opt(m.ap)},         {"ap50", opt(m.ap50)},
            {"ap75", opt(m.ap75)},     {"ap_small", opt(m.ap_small)},
            {"ap_medium", opt(m.ap_medium)}, {"ap_large", opt(m.ap_large)}};
}

std::string cell(const std::optional<double>& v) {
    if (!v) return "     -";
    char buf[16];
    std::snprintf(buf, sizeof buf, "%.4f", *v);
    return buf;
}

} // namespace

std::string summary_to_json(const std::vector<std::pair<std::string, EvalSummary>>& by_attribute) {
    nlohmann::json doc;
    for (const auto& [attribute, summary] : by_attribute) {
        nlohmann::json entry;
        for (const auto& [label, m] : summary.per_class) entry["classes"][label] = metric_json(m);
        entry["overall"] = metric_json(summary.overall);
        doc[attribute] = std::move(entry);
    }
    return doc.dump(2) + "\n";
}

std::string render_summary_table(
    const std::vector<std::pair<std::string, EvalSummary>>& by_attribute) {
    std::string out = "Attribute  Class            AP      AP50    AP75    APs     APm     APl\n";
    char line[160];
    for (const auto& [attribute, summary] : by_attribute) {
        const auto row = [&](const std::string& name, const MetricSet& m) {
            std::snprintf(line, sizeof line, "%-10s %-16s %s  %s  %s  %s  %s  %s\n",
                          attribute.c_str(), name.c_str(), cell(m.ap).c_str(),
                          cell(m.ap50).c_str(), cell(m.ap75).c_str(), cell(m.ap_small).c_str(),
                          cell(m.ap_medium).c_str(), cell(m.ap_large).c_str());
            out += line;
        };
        for (const auto& [label, m] : summary.per_class) row(label, m);
        row("overall", summary.overall);
    }
    return out;
}

} // namespace lotscan
