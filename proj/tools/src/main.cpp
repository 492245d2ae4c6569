// lotscan: parcel imagery pipeline driver.
//
// Subcommands map onto the library stages: stitch, extract, annotations,
// augment, anchors, nms, evaluate, occupancy. A JSON config file supplies
// defaults; explicit flags win. Logs go to stderr, data to files (debug
// utilities print to stdout when no output path is given).
//
// Exit codes: 0 success, 1 partial (per-item failures recorded in the
// output), 2 fatal input error.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lotscan/augment.hpp"
#include "lotscan/dataset.hpp"
#include "lotscan/detection_geometry.hpp"
#include "lotscan/detections_io.hpp"
#include "lotscan/errors.hpp"
#include "lotscan/evaluate.hpp"
#include "lotscan/geotiff.hpp"
#include "lotscan/labelme.hpp"
#include "lotscan/occupancy.hpp"
#include "lotscan/parcel_extract.hpp"
#include "lotscan/png_io.hpp"
#include "lotscan/shapefile.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void log_info(const std::string& msg) { std::cerr << "[lotscan] " << msg << "\n"; }

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) lotscan::fail(lotscan::errc::io, "cannot open " + path.string() + " for writing");
    out << text;
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) lotscan::fail(lotscan::errc::io, "cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Global options shared by every subcommand. Config values fill anything the
// command line leaves unset.
struct GlobalOpts {
    std::string config_path;
    fs::path out = ".";
    std::uint64_t seed = 0;
    unsigned jobs = 1;
    json config = json::object();

    [[nodiscard]] json section(const std::string& name) const {
        return config.value(name, json::object());
    }

    void load_config() {
        if (config_path.empty()) return;
        config = json::parse(read_text(config_path));
    }
};

template <typename T>
void from_config(const json& section, const char* key, T& value, const CLI::Option* opt) {
    if (opt && opt->count() > 0) return; // explicit flag wins
    if (section.contains(key)) value = section[key].get<T>();
}

// ---------------------------------------------------------------------------
// stitch
// ---------------------------------------------------------------------------

struct StitchArgs {
    std::vector<std::string> rasters;
    std::string output = "mosaic.tif";
    bool deflate = false;
};

int run_stitch(const GlobalOpts& g, const StitchArgs& a) {
    std::vector<lotscan::GeoRaster> inputs;
    inputs.reserve(a.rasters.size());
    for (const auto& p : a.rasters) inputs.push_back(lotscan::load_geotiff(p));
    const lotscan::GeoRaster m = lotscan::mosaic(inputs);

    fs::create_directories(g.out);
    const fs::path out_path = g.out / a.output;
    lotscan::write_geotiff(m, out_path, a.deflate);

    const auto lo = lotscan::pixel_to_world(m.transform, 0, m.height);
    const auto hi = lotscan::pixel_to_world(m.transform, m.width, 0);
    log_info("mosaic " + std::to_string(m.width) + "x" + std::to_string(m.height) +
             " extent [" + std::to_string(lo.x) + ", " + std::to_string(lo.y) + ", " +
             std::to_string(hi.x) + ", " + std::to_string(hi.y) + "] -> " + out_path.string());
    return 0;
}

// ---------------------------------------------------------------------------
// extract
// ---------------------------------------------------------------------------

struct ExtractArgs {
    std::vector<std::string> rasters;
    std::string shapefile;
    std::string where;
    int crs = 0;
};

int run_extract(const GlobalOpts& g, const ExtractArgs& a) {
    std::optional<lotscan::AttributePredicate> pred;
    if (!a.where.empty()) pred = lotscan::parse_predicate(a.where);

    lotscan::ExtractOptions opts;
    opts.jobs = g.jobs;
    opts.shapefile_crs = a.crs;

    std::vector<fs::path> raster_paths(a.rasters.begin(), a.rasters.end());
    const auto manifest = lotscan::extract_all(raster_paths, a.shapefile,
                                               pred ? &*pred : nullptr, g.out, opts);
    write_text(g.out / "manifest.json", manifest.to_json());
    log_info(std::to_string(manifest.entries.size()) + " parcels, " +
             std::to_string(manifest.failed) + " failed");
    return manifest.failed == 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------
// annotations
// ---------------------------------------------------------------------------

struct AnnotationsArgs {
    std::string input_dir;
};

int run_annotations(const GlobalOpts& g, const AnnotationsArgs& a) {
    fs::create_directories(g.out / "images");
    fs::create_directories(g.out / "masks");

    std::vector<fs::path> docs;
    for (const auto& entry : fs::directory_iterator(a.input_dir))
        if (entry.path().extension() == ".json") docs.push_back(entry.path());
    std::sort(docs.begin(), docs.end());

    lotscan::Dataset ds;
    ds.root = g.out;
    std::size_t failed = 0;
    for (const auto& doc : docs) {
        const std::string stem = doc.stem().string();
        try {
            const lotscan::AnnotatedImage ann = lotscan::parse_labelme(read_text(doc));

            lotscan::DatasetImage img;
            img.image_path = "images/" + stem + ".png";
            img.width = ann.width;
            img.height = ann.height;

            const fs::path source_png = doc.parent_path() / (stem + ".png");
            if (fs::exists(source_png)) {
                fs::copy_file(source_png, ds.root / img.image_path,
                              fs::copy_options::overwrite_existing);
            } else {
                log_info("warning: no image next to " + doc.filename().string());
            }

            for (const auto& inst : ann.instances) {
                lotscan::DatasetInstance out;
                out.id = inst.instance_id;
                out.label = inst.label;
                out.bbox = lotscan::polygon_to_bbox(inst.polygon);
                out.mask_path = "masks/" + stem + "_" + std::to_string(inst.instance_id) +
                                ".rle.json";
                const lotscan::BitMask mask =
                    lotscan::polygon_to_mask(inst.polygon, ann.width, ann.height);
                lotscan::save_instance_mask(ds, out, lotscan::rle_encode(mask));
                img.instances.push_back(std::move(out));
            }
            ds.images.push_back(std::move(img));
        } catch (const lotscan::Error& e) {
            log_info(doc.filename().string() + ": " + e.what());
            ++failed;
        }
    }
    lotscan::save_dataset_index(ds);
    log_info(std::to_string(ds.images.size()) + " images indexed, " + std::to_string(failed) +
             " annotation files failed");
    return failed == 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------
// augment
// ---------------------------------------------------------------------------

struct AugmentArgs {
    std::string dataset_dir;
    double rotation_min = -50.0;
    double rotation_max = 50.0;
    bool no_flip = false;
    int per_image_outputs = 2;
};

int run_augment(const GlobalOpts& g, const AugmentArgs& a) {
    lotscan::AugmentConfig cfg;
    cfg.rotation_min_deg = a.rotation_min;
    cfg.rotation_max_deg = a.rotation_max;
    cfg.vertical_flip = !a.no_flip;
    cfg.per_image_outputs = a.per_image_outputs;
    cfg.seed = g.seed;

    const lotscan::Dataset in = lotscan::load_dataset(a.dataset_dir);
    const lotscan::Dataset out = lotscan::expand_dataset(in, g.out, cfg, g.jobs);
    log_info(std::to_string(in.images.size()) + " -> " + std::to_string(out.images.size()) +
             " images");
    return 0;
}

// ---------------------------------------------------------------------------
// anchors / nms (debug utilities)
// ---------------------------------------------------------------------------

struct AnchorsArgs {
    std::vector<double> scales{128.0, 256.0, 512.0};
    std::vector<double> ratios{0.5, 1.0, 2.0};
    double stride = 16.0;
    std::int64_t fm_width = 1;
    std::int64_t fm_height = 1;
    std::string output;
};

int run_anchors(const GlobalOpts& g, const AnchorsArgs& a) {
    lotscan::AnchorConfig cfg;
    cfg.scales = a.scales;
    cfg.aspect_ratios = a.ratios;
    cfg.stride = a.stride;
    const auto anchors = lotscan::generate_anchors(cfg, a.fm_width, a.fm_height);

    json doc = json::array();
    for (const auto& b : anchors) doc.push_back({b.x_min, b.y_min, b.x_max, b.y_max});
    const std::string text = doc.dump(2) + "\n";
    if (a.output.empty()) {
        std::cout << text;
    } else {
        fs::create_directories(g.out);
        write_text(g.out / a.output, text);
    }
    log_info(std::to_string(anchors.size()) + " anchors");
    return 0;
}

struct NmsArgs {
    std::string detections;
    double iou_threshold = lotscan::default_nms_iou_threshold;
    std::string output;
};

int run_nms(const GlobalOpts& g, const NmsArgs& a) {
    const auto dets = lotscan::load_detections(a.detections);

    // Suppress within each (image, label) group; survivors keep file order.
    std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < dets.size(); ++i)
        groups[{dets[i].image_id, dets[i].label}].push_back(i);

    std::vector<bool> keep(dets.size(), false);
    for (const auto& [key, indices] : groups) {
        std::vector<lotscan::BBox> boxes;
        std::vector<double> scores;
        for (auto i : indices) {
            boxes.push_back(dets[i].bbox);
            scores.push_back(dets[i].score);
        }
        for (auto k : lotscan::nms(boxes, scores, a.iou_threshold)) keep[indices[k]] = true;
    }

    std::vector<lotscan::Detection> kept;
    for (std::size_t i = 0; i < dets.size(); ++i)
        if (keep[i]) kept.push_back(dets[i]);

    const std::string text = lotscan::detections_to_jsonl(kept);
    if (a.output.empty()) {
        std::cout << text;
    } else {
        fs::create_directories(g.out);
        write_text(g.out / a.output, text);
    }
    log_info(std::to_string(dets.size()) + " -> " + std::to_string(kept.size()) + " detections");
    return 0;
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

struct EvaluateArgs {
    std::string gt_dir;
    std::string detections;
    std::string kind = "auto"; // box | mask | both | auto
    std::size_t max_dets = 100;
};

int run_evaluate(const GlobalOpts& g, const EvaluateArgs& a) {
    const auto dets = lotscan::load_detections(a.detections);
    const lotscan::Dataset ds = lotscan::load_dataset(a.gt_dir);

    bool want_box = a.kind == "box" || a.kind == "both" || a.kind == "auto";
    bool want_mask = a.kind == "mask" || a.kind == "both";
    if (a.kind == "auto") {
        want_mask = !dets.empty();
        for (const auto& d : dets)
            if (!d.rle) want_mask = false;
    }

    std::vector<std::pair<std::string, lotscan::EvalSummary>> results;
    if (want_box) {
        lotscan::EvalConfig cfg;
        cfg.iou_kind = lotscan::IouKind::box;
        cfg.max_dets_per_image = a.max_dets;
        const auto gt = lotscan::ground_truth_from_dataset(ds, false);
        results.emplace_back("bbox", lotscan::evaluate(gt, dets, cfg));
    }
    if (want_mask) {
        lotscan::EvalConfig cfg;
        cfg.iou_kind = lotscan::IouKind::mask;
        cfg.max_dets_per_image = a.max_dets;
        const auto gt = lotscan::ground_truth_from_dataset(ds, true);
        results.emplace_back("mask", lotscan::evaluate(gt, dets, cfg));
    }

    fs::create_directories(g.out);
    write_text(g.out / "report.json", lotscan::summary_to_json(results));
    write_text(g.out / "report.txt", lotscan::render_summary_table(results));
    log_info("report written to " + (g.out / "report.txt").string());
    return 0;
}

// ---------------------------------------------------------------------------
// occupancy
// ---------------------------------------------------------------------------

struct OccupancyArgs {
    std::string detections;
    double threshold = 0.5;
    bool use_boxes = false;
    std::string base_dir; // optional per-image base PNGs for overlays
    bool overlay = false;
};

int run_occupancy(const GlobalOpts& g, const OccupancyArgs& a) {
    const auto dets = lotscan::load_detections(a.detections);

    std::map<std::string, std::vector<std::size_t>> by_image;
    for (std::size_t i = 0; i < dets.size(); ++i) by_image[dets[i].image_id].push_back(i);

    fs::create_directories(g.out);
    json combined = json::object();
    std::string csv = "image_id,space_id,occupied,coverage\n";

    for (const auto& [image_id, indices] : by_image) {
        std::vector<lotscan::RleMask> space_masks, vehicle_masks;
        std::vector<lotscan::BBox> space_boxes, vehicle_boxes;
        for (auto i : indices) {
            const auto& d = dets[i];
            if (d.label == lotscan::label_parking_space) {
                space_boxes.push_back(d.bbox);
                if (d.rle) space_masks.push_back(*d.rle);
            } else if (d.label == lotscan::label_vehicle) {
                vehicle_boxes.push_back(d.bbox);
                if (d.rle) vehicle_masks.push_back(*d.rle);
            }
        }

        const bool masks_complete = space_masks.size() == space_boxes.size() &&
                                    vehicle_masks.size() == vehicle_boxes.size() &&
                                    !space_masks.empty();
        lotscan::OccupancyReport report;
        if (!a.use_boxes && masks_complete) {
            report = lotscan::assess_occupancy(space_masks, vehicle_masks, a.threshold);
        } else {
            report = lotscan::occupancy_from_bboxes(space_boxes, vehicle_boxes, a.threshold);
        }

        combined[image_id] = json::parse(report.to_json());
        char line[96];
        for (const auto& s : report.spaces) {
            std::snprintf(line, sizeof line, "%s,%d,%s,%.6f\n", image_id.c_str(), s.space_id,
                          s.occupied ? "true" : "false", s.coverage_fraction);
            csv += line;
        }

        if (a.overlay && masks_complete && !a.base_dir.empty()) {
            const fs::path base = fs::path(a.base_dir) / (image_id + ".png");
            if (fs::exists(base)) {
                const auto img = lotscan::load_png(base);
                const auto over = lotscan::occupancy_overlay(img, space_masks, report);
                lotscan::write_png(over, g.out / ("overlay_" + image_id + ".png"));
            }
        }
    }

    write_text(g.out / "occupancy.json", combined.dump(2) + "\n");
    write_text(g.out / "occupancy.csv", csv);
    log_info("occupancy for " + std::to_string(by_image.size()) + " image(s) written");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"parking-lot imagery pipeline"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--config", g.config_path, "JSON config file with per-stage defaults");
    auto* out_opt = app.add_option("--out", g.out, "output directory");
    auto* seed_opt = app.add_option("--seed", g.seed, "seed for randomized stages");
    auto* jobs_opt = app.add_option("--jobs", g.jobs, "worker threads");

    StitchArgs stitch;
    auto* cmd_stitch = app.add_subcommand("stitch", "mosaic rasters onto one grid");
    auto* stitch_rasters = cmd_stitch->add_option("rasters", stitch.rasters, "input GeoTIFFs");
    auto* stitch_output = cmd_stitch->add_option("--output", stitch.output, "mosaic file name");
    auto* stitch_deflate = cmd_stitch->add_flag("--deflate", stitch.deflate, "compress output");

    ExtractArgs extract;
    auto* cmd_extract = app.add_subcommand("extract", "crop parcels from rasters");
    auto* ex_rasters = cmd_extract->add_option("--rasters", extract.rasters, "input GeoTIFFs");
    auto* ex_shape = cmd_extract->add_option("--shapefile", extract.shapefile, "parcel .shp path");
    auto* ex_where = cmd_extract->add_option("--where", extract.where,
                                             "attribute predicate, e.g. LOT=yes");
    auto* ex_crs = cmd_extract->add_option("--crs", extract.crs, "shapefile CRS code");

    AnnotationsArgs ann;
    auto* cmd_ann = app.add_subcommand("annotations", "LabelMe JSONs -> dataset");
    auto* ann_in = cmd_ann->add_option("--input", ann.input_dir, "directory of LabelMe JSONs");

    AugmentArgs aug;
    auto* cmd_aug = app.add_subcommand("augment", "expand a dataset with rotations and flips");
    auto* aug_ds = cmd_aug->add_option("--dataset", aug.dataset_dir, "input dataset directory");
    auto* aug_lo = cmd_aug->add_option("--rotation-min", aug.rotation_min, "degrees");
    auto* aug_hi = cmd_aug->add_option("--rotation-max", aug.rotation_max, "degrees");
    auto* aug_noflip = cmd_aug->add_flag("--no-flip", aug.no_flip, "disable vertical flips");
    auto* aug_n = cmd_aug->add_option("--per-image-outputs", aug.per_image_outputs,
                                      "variants per source image");

    AnchorsArgs anchors;
    auto* cmd_anchors = app.add_subcommand("anchors", "dump the anchor grid");
    cmd_anchors->add_option("--scales", anchors.scales, "anchor scales (pixels)");
    cmd_anchors->add_option("--ratios", anchors.ratios, "width:height ratios");
    cmd_anchors->add_option("--stride", anchors.stride, "feature stride");
    cmd_anchors->add_option("--fm-width", anchors.fm_width, "feature map width");
    cmd_anchors->add_option("--fm-height", anchors.fm_height, "feature map height");
    cmd_anchors->add_option("--output", anchors.output, "write to file instead of stdout");

    NmsArgs nms_args;
    auto* cmd_nms = app.add_subcommand("nms", "suppress overlapping detections");
    auto* nms_in = cmd_nms->add_option("--detections", nms_args.detections, "JSONL input");
    cmd_nms->add_option("--iou-threshold", nms_args.iou_threshold, "suppression threshold");
    cmd_nms->add_option("--output", nms_args.output, "write to file instead of stdout");

    EvaluateArgs ev;
    auto* cmd_eval = app.add_subcommand("evaluate", "COCO-style AP report");
    auto* ev_gt = cmd_eval->add_option("--gt", ev.gt_dir, "ground-truth dataset directory");
    auto* ev_det = cmd_eval->add_option("--detections", ev.detections, "detections JSONL");
    cmd_eval->add_option("--kind", ev.kind, "box|mask|both|auto")
        ->check(CLI::IsMember({"box", "mask", "both", "auto"}));
    cmd_eval->add_option("--max-dets", ev.max_dets, "per-image detection cap");

    OccupancyArgs occ;
    auto* cmd_occ = app.add_subcommand("occupancy", "per-space occupancy report");
    auto* occ_det = cmd_occ->add_option("--detections", occ.detections, "detections JSONL");
    cmd_occ->add_option("--threshold", occ.threshold, "coverage threshold");
    cmd_occ->add_flag("--use-boxes", occ.use_boxes, "force the bbox baseline");
    cmd_occ->add_option("--base-dir", occ.base_dir, "directory of <image_id>.png bases");
    cmd_occ->add_flag("--overlay", occ.overlay, "render outline overlays");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2; // usage problems are fatal input errors
    }

    try {
        g.load_config();
        // Config fills in whatever the command line left unset.
        from_config(g.config, "out", g.out, out_opt);
        from_config(g.config, "seed", g.seed, seed_opt);
        from_config(g.config, "jobs", g.jobs, jobs_opt);

        if (*cmd_stitch) {
            const json s = g.section("stitch");
            from_config(s, "rasters", stitch.rasters, stitch_rasters);
            from_config(s, "output", stitch.output, stitch_output);
            from_config(s, "deflate", stitch.deflate, stitch_deflate);
            return run_stitch(g, stitch);
        }
        if (*cmd_extract) {
            const json s = g.section("extract");
            from_config(s, "rasters", extract.rasters, ex_rasters);
            from_config(s, "shapefile", extract.shapefile, ex_shape);
            from_config(s, "where", extract.where, ex_where);
            from_config(s, "crs", extract.crs, ex_crs);
            return run_extract(g, extract);
        }
        if (*cmd_ann) {
            from_config(g.section("annotations"), "input", ann.input_dir, ann_in);
            return run_annotations(g, ann);
        }
        if (*cmd_aug) {
            const json s = g.section("augment");
            from_config(s, "dataset", aug.dataset_dir, aug_ds);
            from_config(s, "rotation_min", aug.rotation_min, aug_lo);
            from_config(s, "rotation_max", aug.rotation_max, aug_hi);
            from_config(s, "no_flip", aug.no_flip, aug_noflip);
            from_config(s, "per_image_outputs", aug.per_image_outputs, aug_n);
            return run_augment(g, aug);
        }
        if (*cmd_anchors) return run_anchors(g, anchors);
        if (*cmd_nms) {
            from_config(g.section("nms"), "detections", nms_args.detections, nms_in);
            return run_nms(g, nms_args);
        }
        if (*cmd_eval) {
            const json s = g.section("evaluate");
            from_config(s, "gt", ev.gt_dir, ev_gt);
            from_config(s, "detections", ev.detections, ev_det);
            return run_evaluate(g, ev);
        }
        if (*cmd_occ) {
            const json s = g.section("occupancy");
            from_config(s, "detections", occ.detections, occ_det);
            return run_occupancy(g, occ);
        }
    } catch (const lotscan::Error& e) {
        std::cerr << "[lotscan] error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "[lotscan] config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "[lotscan] error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
