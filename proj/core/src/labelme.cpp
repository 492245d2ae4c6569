#include "lotscan/labelme.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>

#include "lotscan/errors.hpp"
#include "lotscan/rasterize.hpp"

namespace lotscan {

std::string normalize_label(const std::string& raw) {
    std::string out;
    out.reserve(raw.size());
    for (char c : raw)
        out.push_back(c == ' ' ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return out;
}

AnnotatedImage parse_labelme(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        fail(errc::schema, std::string("annotation is not valid JSON: ") + e.what());
    }

    if (!doc.contains("imageWidth") || !doc.contains("imageHeight"))
        fail(errc::schema, "annotation lacks imageWidth/imageHeight");
    if (!doc.contains("shapes") || !doc["shapes"].is_array())
        fail(errc::schema, "annotation lacks a shapes array");

    AnnotatedImage img;
    img.width = doc["imageWidth"].get<std::int64_t>();
    img.height = doc["imageHeight"].get<std::int64_t>();
    if (img.width < 1 || img.height < 1)
        fail(errc::schema, "image dimensions must be positive");

    int next_id = 0;
    for (const auto& shape : doc["shapes"]) {
        if (!shape.contains("label") || !shape.contains("points"))
            fail(errc::schema, "shape lacks label or points");
        const std::string shape_type =
            shape.value("shape_type", std::string("polygon"));
        if (shape_type != "polygon")
            fail(errc::schema, "only polygon shapes are accepted, got \"" + shape_type + "\"");

        AnnotatedInstance inst;
        inst.label = normalize_label(shape["label"].get<std::string>());
        if (inst.label != label_parking_space && inst.label != label_vehicle)
            fail(errc::label, "unknown label \"" + inst.label + "\" (accepted: parking_space, vehicle)");

        for (const auto& pt : shape["points"]) {
            if (!pt.is_array() || pt.size() != 2)
                fail(errc::schema, "polygon point must be an [x,y] pair");
            // LabelMe occasionally overshoots the canvas; clamp into bounds.
            const double x = std::clamp(pt[0].get<double>(), 0.0, static_cast<double>(img.width));
            const double y = std::clamp(pt[1].get<double>(), 0.0, static_cast<double>(img.height));
            inst.polygon.push_back({x, y});
        }
        if (inst.polygon.size() < 3)
            fail(errc::schema, "polygon needs at least 3 points");
        inst.instance_id = next_id++;
        img.instances.push_back(std::move(inst));
    }
    return img;
}

BBox polygon_to_bbox(const std::vector<Point>& polygon) {
    BBox b{polygon[0].x, polygon[0].y, polygon[0].x, polygon[0].y};
    for (const auto& p : polygon) {
        b.x_min = std::min(b.x_min, p.x);
        b.y_min = std::min(b.y_min, p.y);
        b.x_max = std::max(b.x_max, p.x);
        b.y_max = std::max(b.y_max, p.y);
    }
    return b;
}

BitMask polygon_to_mask(const std::vector<Point>& polygon, std::int64_t w, std::int64_t h) {
    PolygonGeom g;
    auto ring = polygon;
    if (!(ring.front() == ring.back())) ring.push_back(ring.front());
    g.rings.push_back(std::move(ring));
    return rasterize_polygon_pixels(g, w, h);
}

} // namespace lotscan
