#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "eval_oracle.hpp"
#include "lotscan/detection_geometry.hpp"
#include "lotscan/evaluate.hpp"
#include "lotscan/rle.hpp"

using namespace lotscan;

namespace {

GroundTruthInstance gt_box(const std::string& label, double x0, double y0, double x1, double y1) {
    GroundTruthInstance g;
    g.label = label;
    g.bbox = {x0, y0, x1, y1};
    return g;
}

Detection det_box(const std::string& image, const std::string& label, double score, double x0,
                  double y0, double x1, double y1) {
    Detection d;
    d.image_id = image;
    d.label = label;
    d.score = score;
    d.bbox = {x0, y0, x1, y1};
    return d;
}

std::optional<double> class_metric(const EvalSummary& s, const std::string& label,
                                   std::optional<double> MetricSet::*member) {
    for (const auto& [name, m] : s.per_class)
        if (name == label) return m.*member;
    return std::nullopt;
}

} // namespace

TEST_CASE("match_detections basics") {
    std::vector<GroundTruthInstance> gt{gt_box("vehicle", 0, 0, 4, 4),
                                        gt_box("vehicle", 10, 10, 14, 14)};

    SUBCASE("detections equal to ground truth all match") {
        std::vector<Detection> det{det_box("a", "vehicle", 1.0, 0, 0, 4, 4),
                                   det_box("a", "vehicle", 1.0, 10, 10, 14, 14)};
        const auto m = match_detections(gt, det, 0.5, IouKind::box);
        CHECK(m.det_to_gt == std::vector<int>{0, 1});
        CHECK(m.gt_to_det == std::vector<int>{0, 1});
    }
    SUBCASE("one truth, two overlapping detections: higher score wins") {
        std::vector<GroundTruthInstance> one{gt_box("vehicle", 0, 0, 4, 4)};
        std::vector<Detection> det{det_box("a", "vehicle", 0.6, 0, 0, 4, 4),
                                   det_box("a", "vehicle", 0.9, 0.2, 0, 4.2, 4)};
        const auto m = match_detections(one, det, 0.5, IouKind::box);
        CHECK(m.det_to_gt == std::vector<int>{-1, 0});
    }
    SUBCASE("labels must agree") {
        std::vector<Detection> det{det_box("a", "parking_space", 0.9, 0, 0, 4, 4)};
        const auto m = match_detections(gt, det, 0.5, IouKind::box);
        CHECK(m.det_to_gt == std::vector<int>{-1});
    }
    SUBCASE("3 gt / 4 det fixture equals an explicit-loop rerun") {
        std::vector<GroundTruthInstance> gts{gt_box("vehicle", 0, 0, 4, 4),
                                             gt_box("vehicle", 3, 0, 7, 4),
                                             gt_box("vehicle", 20, 20, 24, 24)};
        std::vector<Detection> det{det_box("a", "vehicle", 0.7, 0.5, 0, 4.5, 4),
                                   det_box("a", "vehicle", 0.9, 3.1, 0, 7.1, 4),
                                   det_box("a", "vehicle", 0.5, 0, 0, 4, 4),
                                   det_box("a", "vehicle", 0.3, 50, 50, 54, 54)};
        const auto m = match_detections(gts, det, 0.5, IouKind::box);

        // Direct reference: loop detections by descending score with
        // explicit argmax over unmatched truths.
        std::vector<int> order{1, 0, 2, 3};
        std::vector<int> expect_det(4, -1);
        std::vector<bool> taken(3, false);
        for (int d : order) {
            int best = -1;
            double best_iou = 0.5;
            for (int g = 0; g < 3; ++g) {
                if (taken[g]) continue;
                const double iou = iou_box(gts[g].bbox, det[d].bbox);
                if (iou > best_iou || (iou == best_iou && best < 0 && iou >= 0.5)) {
                    best_iou = iou;
                    best = g;
                }
            }
            if (best >= 0) {
                taken[best] = true;
                expect_det[d] = best;
            }
        }
        CHECK(m.det_to_gt == expect_det);
    }
}

TEST_CASE("precision/recall curve and AP on the hand-enumerated fixture") {
    // Pooled outcomes: [.9 TP, .8 FP, .7 TP], 2 ground truths.
    std::vector<ScoredOutcome> pooled{{0.9, 0, true}, {0.8, 1, false}, {0.7, 2, true}};
    const PrCurve curve = precision_recall_curve(pooled, 2);

    REQUIRE(curve.recall.size() == 3);
    CHECK(curve.recall[0] == doctest::Approx(0.5));
    CHECK(curve.recall[2] == doctest::Approx(1.0));
    // Envelope: 1.0, 2/3, 2/3.
    CHECK(curve.precision[0] == doctest::Approx(1.0));
    CHECK(curve.precision[1] == doctest::Approx(2.0 / 3.0));
    CHECK(curve.precision[2] == doctest::Approx(2.0 / 3.0));

    // Brute-force 101-point sum: 51 grid points at precision 1.0 (recall
    // <= 0.5), 50 at 2/3.
    const double expect = (51.0 * 1.0 + 50.0 * (2.0 / 3.0)) / 101.0;
    CHECK(average_precision(curve) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("degenerate curves") {
    CHECK(average_precision(precision_recall_curve({{1.0, 0, true}}, 1)) == doctest::Approx(1.0));
    CHECK_FALSE(average_precision(precision_recall_curve({}, 0)).has_value());
    CHECK(average_precision(precision_recall_curve({{0.9, 0, false}}, 3)) ==
          doctest::Approx(0.0));
    CHECK(average_precision(precision_recall_curve({}, 3)) == doctest::Approx(0.0));
}

namespace {

struct Fixture {
    GroundTruth gt;
    std::vector<Detection> dets;
    std::vector<oracle::Gt> ogt;
    std::vector<oracle::Det> odet;

    void add_gt(const std::string& image, const std::string& label, double x0, double y0,
                double x1, double y1) {
        auto it = std::find_if(gt.begin(), gt.end(),
                               [&](const GroundTruthImage& g) { return g.image_id == image; });
        if (it == gt.end()) {
            gt.push_back({image, {}});
            it = gt.end() - 1;
        }
        it->instances.push_back(gt_box(label, x0, y0, x1, y1));
        ogt.push_back({image, label, {x0, y0, x1, y1}, {}});
    }

    void add_det(const std::string& image, const std::string& label, double score, double x0,
                 double y0, double x1, double y1) {
        dets.push_back(det_box(image, label, score, x0, y0, x1, y1));
        odet.push_back({image, label, score, {x0, y0, x1, y1}, {}, odet.size()});
    }
};

void check_against_oracle(const Fixture& f, const EvalConfig& cfg) {
    const EvalSummary summary = evaluate(f.gt, f.dets, cfg);

    std::set<std::string> labels;
    for (const auto& g : f.ogt) labels.insert(g.label);
    for (const auto& d : f.odet) labels.insert(d.label);

    const auto check_opt = [](std::optional<double> got, std::optional<double> want,
                              const char* what) {
        CAPTURE(what);
        REQUIRE(got.has_value() == want.has_value());
        if (got) CHECK(*got == doctest::Approx(*want).epsilon(1e-12));
    };

    for (const auto& label : labels) {
        const auto expect = oracle::evaluate_class(f.ogt, f.odet, label, false,
                                                   cfg.max_dets_per_image);
        check_opt(class_metric(summary, label, &MetricSet::ap), expect.ap, "ap");
        check_opt(class_metric(summary, label, &MetricSet::ap50), expect.ap50, "ap50");
        check_opt(class_metric(summary, label, &MetricSet::ap75), expect.ap75, "ap75");
        check_opt(class_metric(summary, label, &MetricSet::ap_small), expect.ap_s, "aps");
        check_opt(class_metric(summary, label, &MetricSet::ap_medium), expect.ap_m, "apm");
        check_opt(class_metric(summary, label, &MetricSet::ap_large), expect.ap_l, "apl");
    }
}

} // namespace

TEST_CASE("perfect detector scores 1.0 on every defined metric") {
    Fixture f;
    f.add_gt("a", "vehicle", 0, 0, 20, 20);          // small (400)
    f.add_gt("a", "parking_space", 0, 0, 50, 50);    // medium (2500)
    f.add_gt("b", "vehicle", 0, 0, 100, 100);        // large (10000)
    for (const auto& img : f.gt)
        for (const auto& inst : img.instances)
            f.add_det(img.image_id, inst.label, 1.0, inst.bbox.x_min, inst.bbox.y_min,
                      inst.bbox.x_max, inst.bbox.y_max);

    const EvalSummary s = evaluate(f.gt, f.dets, EvalConfig{});
    CHECK(*s.overall.ap == doctest::Approx(1.0));
    CHECK(*s.overall.ap50 == doctest::Approx(1.0));
    CHECK(*s.overall.ap75 == doctest::Approx(1.0));
    CHECK(*class_metric(s, "vehicle", &MetricSet::ap_small) == doctest::Approx(1.0));
    CHECK(*class_metric(s, "vehicle", &MetricSet::ap_large) == doctest::Approx(1.0));
    // vehicle has no medium ground truth anywhere: undefined.
    CHECK_FALSE(class_metric(s, "vehicle", &MetricSet::ap_medium).has_value());
    check_against_oracle(f, EvalConfig{});
}

TEST_CASE("empty detections score 0.0 on defined buckets") {
    Fixture f;
    f.add_gt("a", "vehicle", 0, 0, 20, 20);
    f.add_gt("b", "parking_space", 0, 0, 50, 50);
    const EvalSummary s = evaluate(f.gt, f.dets, EvalConfig{});
    CHECK(*s.overall.ap == doctest::Approx(0.0));
    CHECK(*s.overall.ap50 == doctest::Approx(0.0));
    CHECK(*class_metric(s, "vehicle", &MetricSet::ap_small) == doctest::Approx(0.0));
    check_against_oracle(f, EvalConfig{});
}

TEST_CASE("planted 5-image fixture matches the brute-force evaluator exactly") {
    Fixture f;
    // Image a: two small vehicles, one matched at high IoU, one missed.
    f.add_gt("a", "vehicle", 0, 0, 20, 20);
    f.add_gt("a", "vehicle", 40, 40, 60, 60);
    f.add_det("a", "vehicle", 0.95, 1, 1, 20, 20);    // strong TP
    f.add_det("a", "vehicle", 0.40, 100, 100, 120, 120); // FP off in the weeds

    // Image b: medium parking space matched at moderate IoU (dies at high
    // thresholds), plus a duplicate.
    f.add_gt("b", "parking_space", 0, 0, 50, 50);
    f.add_det("b", "parking_space", 0.80, 8, 0, 50, 50);
    f.add_det("b", "parking_space", 0.70, 9, 0, 52, 50); // duplicate -> FP

    // Image c: large vehicle with an exact match but low score; a
    // parking_space detection with no truth of that class.
    f.add_gt("c", "vehicle", 0, 0, 100, 100);
    f.add_det("c", "vehicle", 0.20, 0, 0, 100, 100);
    f.add_det("c", "parking_space", 0.90, 0, 0, 30, 30);

    // Image d: truth with no detections at all.
    f.add_gt("d", "parking_space", 0, 0, 96, 96);

    // Image e: cross-image score interleaving and a borderline-IoU match.
    f.add_gt("e", "vehicle", 10, 10, 40, 40);
    f.add_det("e", "vehicle", 0.85, 10, 10, 40, 40);
    f.add_det("e", "vehicle", 0.84, 12, 12, 42, 42); // overlaps the same truth

    check_against_oracle(f, EvalConfig{});

    // Macro-average over the two classes, computed by hand from the oracle.
    const auto veh = oracle::evaluate_class(f.ogt, f.odet, "vehicle", false);
    const auto park = oracle::evaluate_class(f.ogt, f.odet, "parking_space", false);
    const EvalSummary s = evaluate(f.gt, f.dets, EvalConfig{});
    CHECK(*s.overall.ap == doctest::Approx((*veh.ap + *park.ap) / 2.0).epsilon(1e-12));
}

TEST_CASE("mask evaluation agrees with the dense-mask oracle") {
    const std::int64_t W = 64, H = 64;
    Fixture f;

    const auto rect_mask = [&](std::int64_t x0, std::int64_t y0, std::int64_t x1,
                               std::int64_t y1) {
        BitMask m(W, H);
        for (std::int64_t y = y0; y < y1; ++y)
            for (std::int64_t x = x0; x < x1; ++x) m.set(x, y);
        return m;
    };
    const auto l_mask = [&](std::int64_t x0, std::int64_t y0) {
        BitMask m(W, H);
        for (std::int64_t y = y0; y < y0 + 20; ++y)
            for (std::int64_t x = x0; x < x0 + 8; ++x) m.set(x, y);
        for (std::int64_t y = y0 + 12; y < y0 + 20; ++y)
            for (std::int64_t x = x0; x < x0 + 20; ++x) m.set(x, y);
        return m;
    };

    const auto to_oracle = [&](const BitMask& m) {
        oracle::Mask om;
        om.w = W;
        om.h = H;
        om.px.assign(m.bits.begin(), m.bits.end());
        return om;
    };

    // Ground truth: an L-shaped vehicle and a rectangular space.
    const BitMask g1 = l_mask(4, 4);
    const BitMask g2 = rect_mask(30, 30, 60, 50);
    f.add_gt("a", "vehicle", 4, 4, 24, 24);
    f.gt[0].instances[0].mask = rle_encode(g1);
    f.ogt[0].mask = to_oracle(g1);
    f.add_gt("a", "parking_space", 30, 30, 60, 50);
    f.gt[0].instances[1].mask = rle_encode(g2);
    f.ogt[1].mask = to_oracle(g2);

    // Detections: the vehicle's bbox-filled mask (mask IoU < box IoU) and a
    // shifted space.
    const BitMask d1 = rect_mask(4, 4, 24, 24);
    f.add_det("a", "vehicle", 0.9, 4, 4, 24, 24);
    f.dets[0].rle = rle_encode(d1);
    f.odet[0].mask = to_oracle(d1);
    const BitMask d2 = rect_mask(32, 30, 62, 50);
    f.add_det("a", "parking_space", 0.8, 32, 30, 62, 50);
    f.dets[1].rle = rle_encode(d2);
    f.odet[1].mask = to_oracle(d2);

    EvalConfig cfg;
    cfg.iou_kind = IouKind::mask;
    const EvalSummary s = evaluate(f.gt, f.dets, cfg);

    for (const auto& label : {"vehicle", "parking_space"}) {
        const auto expect = oracle::evaluate_class(f.ogt, f.odet, label, true);
        const auto got_ap = class_metric(s, label, &MetricSet::ap);
        REQUIRE(got_ap.has_value() == expect.ap.has_value());
        if (got_ap) CHECK(*got_ap == doctest::Approx(*expect.ap).epsilon(1e-12));
    }

    // The L-shape makes mask IoU strictly smaller than box IoU.
    const double bi = iou_box(f.gt[0].instances[0].bbox, f.dets[0].bbox);
    const double mi = iou_mask(*f.gt[0].instances[0].mask, *f.dets[0].rle);
    CHECK(mi < bi);
}

TEST_CASE("area buckets partition the ground truth at 1024 and 9216") {
    // Areas exactly on the boundaries: 32*32 = 1024 is medium
    // (lower-inclusive), 96*96 = 9216 is large.
    Fixture f;
    f.add_gt("a", "vehicle", 0, 0, 32, 32);
    f.add_gt("a", "vehicle", 100, 100, 196, 196);
    f.add_gt("a", "vehicle", 200, 200, 210, 210); // 100: small
    for (const auto& inst : f.gt[0].instances)
        f.add_det("a", "vehicle", 1.0, inst.bbox.x_min, inst.bbox.y_min, inst.bbox.x_max,
                  inst.bbox.y_max);

    const EvalSummary s = evaluate(f.gt, f.dets, EvalConfig{});
    CHECK(*class_metric(s, "vehicle", &MetricSet::ap_small) == doctest::Approx(1.0));
    CHECK(*class_metric(s, "vehicle", &MetricSet::ap_medium) == doctest::Approx(1.0));
    CHECK(*class_metric(s, "vehicle", &MetricSet::ap_large) == doctest::Approx(1.0));
    check_against_oracle(f, EvalConfig{});

    // Each truth lands in exactly one bucket: drop the matching detection
    // and that bucket alone goes to zero.
    Fixture f2 = f;
    f2.dets.erase(f2.dets.begin()); // remove the 1024-area match
    f2.odet.erase(f2.odet.begin());
    for (std::size_t i = 0; i < f2.odet.size(); ++i) f2.odet[i].file_order = i;
    const EvalSummary s2 = evaluate(f2.gt, f2.dets, EvalConfig{});
    CHECK(*class_metric(s2, "vehicle", &MetricSet::ap_medium) == doctest::Approx(0.0));
    CHECK(*class_metric(s2, "vehicle", &MetricSet::ap_small) == doctest::Approx(1.0));
    CHECK(*class_metric(s2, "vehicle", &MetricSet::ap_large) == doctest::Approx(1.0));
}

TEST_CASE("randomized fixtures: oracle equality and metric orderings") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);

    for (int trial = 0; trial < 25; ++trial) {
        Fixture f;
        const int n_images = 1 + int(rng() % 4);
        for (int i = 0; i < n_images; ++i) {
            const std::string image = "img" + std::to_string(i);
            const int n_gt = int(rng() % 4);
            for (int g = 0; g < n_gt; ++g) {
                const double x = u(rng) * 100, y = u(rng) * 100;
                const double w = 5 + u(rng) * 100, h = 5 + u(rng) * 100;
                f.add_gt(image, rng() % 2 ? "vehicle" : "parking_space", x, y, x + w, y + h);
            }
            const int n_det = int(rng() % 5);
            for (int d = 0; d < n_det; ++d) {
                // Perturb a truth or go rogue.
                if (n_gt > 0 && rng() % 3 != 0) {
                    const auto& g = f.gt.back().instances[rng() % n_gt];
                    const double dx = (u(rng) - 0.5) * 20, dy = (u(rng) - 0.5) * 20;
                    f.add_det(image, g.label, u(rng), g.bbox.x_min + dx, g.bbox.y_min + dy,
                              g.bbox.x_max + dx, g.bbox.y_max + dy);
                } else {
                    const double x = u(rng) * 150, y = u(rng) * 150;
                    f.add_det(image, rng() % 2 ? "vehicle" : "parking_space", u(rng), x, y,
                              x + 5 + u(rng) * 60, y + 5 + u(rng) * 60);
                }
            }
        }
        if (f.gt.empty()) continue;
        check_against_oracle(f, EvalConfig{});

        const EvalSummary s = evaluate(f.gt, f.dets, EvalConfig{});
        for (const auto& [label, m] : s.per_class) {
            if (m.ap && m.ap50) CHECK(*m.ap <= *m.ap50 + 1e-12);
            if (m.ap75 && m.ap50) CHECK(*m.ap75 <= *m.ap50 + 1e-12);
        }
    }
}

TEST_CASE("AP monotonicity under added detections") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);

    Fixture f;
    f.add_gt("a", "vehicle", 0, 0, 30, 30);
    f.add_gt("a", "vehicle", 50, 50, 90, 90);
    f.add_gt("b", "vehicle", 10, 10, 60, 60);
    f.add_det("a", "vehicle", 0.6, 1, 1, 30, 30);
    f.add_det("a", "vehicle", 0.5, 200, 200, 230, 230); // FP
    f.add_det("b", "vehicle", 0.4, 12, 10, 62, 60);

    const EvalSummary before = evaluate(f.gt, f.dets, EvalConfig{});

    SUBCASE("a perfect extra detection never lowers AP") {
        Fixture f2 = f;
        f2.add_det("a", "vehicle", 0.99, 50, 50, 90, 90); // matches the open truth
        const EvalSummary after = evaluate(f2.gt, f2.dets, EvalConfig{});
        CHECK(*class_metric(after, "vehicle", &MetricSet::ap) >=
              *class_metric(before, "vehicle", &MetricSet::ap) - 1e-12);
    }
    SUBCASE("a trailing duplicate FP never raises AP50") {
        Fixture f2 = f;
        f2.add_det("a", "vehicle", 0.01, 1, 1, 30, 30); // truth already taken
        const EvalSummary after = evaluate(f2.gt, f2.dets, EvalConfig{});
        CHECK(*class_metric(after, "vehicle", &MetricSet::ap50) <=
              *class_metric(before, "vehicle", &MetricSet::ap50) + 1e-12);
    }
    (void)u;
    (void)rng;
}

TEST_CASE("evaluate is invariant to image order") {
    Fixture f;
    f.add_gt("a", "vehicle", 0, 0, 30, 30);
    f.add_gt("b", "vehicle", 10, 10, 60, 60);
    f.add_gt("c", "parking_space", 5, 5, 40, 40);
    f.add_det("a", "vehicle", 0.8, 0, 0, 30, 30);
    f.add_det("b", "vehicle", 0.7, 100, 100, 130, 130);
    f.add_det("c", "parking_space", 0.9, 5, 5, 40, 40);

    const EvalSummary s1 = evaluate(f.gt, f.dets, EvalConfig{});
    GroundTruth shuffled = f.gt;
    std::reverse(shuffled.begin(), shuffled.end());
    const EvalSummary s2 = evaluate(shuffled, f.dets, EvalConfig{});
    CHECK(*s1.overall.ap == doctest::Approx(*s2.overall.ap).epsilon(1e-15));
    CHECK(*s1.overall.ap50 == doctest::Approx(*s2.overall.ap50).epsilon(1e-15));
}

TEST_CASE("max_dets_per_image caps low-scoring detections") {
    Fixture f;
    f.add_gt("a", "vehicle", 0, 0, 30, 30);
    // One good match below a pile of junk: with the cap at 3, the junk
    // crowds it out.
    f.add_det("a", "vehicle", 0.2, 0, 0, 30, 30);
    for (int i = 0; i < 5; ++i)
        f.add_det("a", "vehicle", 0.5 + 0.01 * i, 200 + 40 * i, 200, 230 + 40 * i, 230);

    EvalConfig cfg;
    cfg.max_dets_per_image = 3;
    const EvalSummary s = evaluate(f.gt, f.dets, cfg);
    CHECK(*class_metric(s, "vehicle", &MetricSet::ap50) == doctest::Approx(0.0));

    EvalConfig wide;
    wide.max_dets_per_image = 100;
    const EvalSummary s2 = evaluate(f.gt, f.dets, wide);
    CHECK(*class_metric(s2, "vehicle", &MetricSet::ap50) > 0.0);
}

TEST_CASE("report rendering") {
    Fixture f;
    f.add_gt("a", "vehicle", 0, 0, 30, 30);
    f.add_det("a", "vehicle", 0.9, 0, 0, 30, 30);
    const EvalSummary s = evaluate(f.gt, f.dets, EvalConfig{});

    const std::string table = render_summary_table({{"bbox", s}});
    CHECK(table.find("AP50") != std::string::npos);
    CHECK(table.find("bbox") != std::string::npos);
    CHECK(table.find("vehicle") != std::string::npos);
    CHECK(table.find("overall") != std::string::npos);

    const std::string json_text = summary_to_json({{"bbox", s}});
    CHECK(json_text.find("\"ap50\"") != std::string::npos);
    CHECK(json_text.find("null") != std::string::npos); // undefined buckets
}
