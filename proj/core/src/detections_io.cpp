#include "lotscan/detections_io.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

#include "lotscan/errors.hpp"

namespace lotscan {
namespace {

Detection parse_line(const std::string& line, std::size_t line_no) {
    const auto where = [line_no](const std::string& msg) {
        return "line " + std::to_string(line_no) + ": " + msg;
    };
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        fail(errc::schema, where(e.what()));
    }
    if (!j.contains("image_id") || !j.contains("label") || !j.contains("score") ||
        !j.contains("bbox"))
        fail(errc::schema, where("detection needs image_id, label, score and bbox"));
    const auto& bb = j["bbox"];
    if (!bb.is_array() || bb.size() != 4)
        fail(errc::schema, where("bbox must be [x_min,y_min,x_max,y_max]"));

    Detection d;
    d.image_id = j["image_id"].get<std::string>();
    d.label = j["label"].get<std::string>();
    d.score = j["score"].get<double>();
    d.bbox = {bb[0].get<double>(), bb[1].get<double>(), bb[2].get<double>(), bb[3].get<double>()};
    if (d.bbox.x_max < d.bbox.x_min || d.bbox.y_max < d.bbox.y_min)
        fail(errc::schema, where("bbox corners are inverted"));
    if (!(d.score >= 0.0 && d.score <= 1.0))
        fail(errc::schema, where("score must lie in [0,1]"));
    if (j.contains("rle")) {
        try {
            d.rle = rle_from_json(j["rle"].dump());
        } catch (const Error& e) {
            fail(errc::schema, where(e.what()));
        }
    }
    return d;
}

} // namespace

std::vector<Detection> parse_detections_jsonl(const std::string& text) {
    std::vector<Detection> out;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        out.push_back(parse_line(line, line_no));
    }
    return out;
}

std::vector<Detection> load_detections(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(errc::io, "cannot open " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_detections_jsonl(text);
}

std::string detections_to_jsonl(const std::vector<Detection>& detections) {
    std::string out;
    for (const auto& d : detections) {
        nlohmann::json j;
        j["image_id"] = d.image_id;
        j["label"] = d.label;
        j["score"] = d.score;
        j["bbox"] = {d.bbox.x_min, d.bbox.y_min, d.bbox.x_max, d.bbox.y_max};
        if (d.rle) {
            j["rle"] = nlohmann::json::parse(rle_to_json(*d.rle));
        }
        out += j.dump();
        out += '\n';
    }
    return out;
}

void save_detections(const std::vector<Detection>& detections,
                     const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(errc::io, "cannot open " + path.string() + " for writing");
    out << detections_to_jsonl(detections);
}

} // namespace lotscan
