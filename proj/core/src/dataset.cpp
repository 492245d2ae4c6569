#include "lotscan/dataset.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

#include "lotscan/errors.hpp"

namespace lotscan {
namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) fail(errc::io, "cannot open " + p.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spew(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) fail(errc::io, "cannot open " + p.string() + " for writing");
    out << text;
}

} // namespace

Dataset load_dataset(const std::filesystem::path& root) {
    const auto index_path = root / "index.json";
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(slurp(index_path));
    } catch (const nlohmann::json::exception& e) {
        fail(errc::schema, index_path.string() + " is not valid JSON: " + e.what());
    }
    if (!doc.is_array()) fail(errc::schema, "dataset index must be a JSON array");

    Dataset ds;
    ds.root = root;
    for (const auto& jimg : doc) {
        DatasetImage img;
        img.image_path = jimg.at("image").get<std::string>();
        img.width = jimg.at("width").get<std::int64_t>();
        img.height = jimg.at("height").get<std::int64_t>();
        for (const auto& jinst : jimg.value("instances", nlohmann::json::array())) {
            DatasetInstance inst;
            inst.id = jinst.at("id").get<int>();
            inst.label = jinst.at("label").get<std::string>();
            const auto& bb = jinst.at("bbox");
            inst.bbox = {bb.at(0).get<double>(), bb.at(1).get<double>(),
                         bb.at(2).get<double>(), bb.at(3).get<double>()};
            inst.mask_path = jinst.value("mask", std::string{});
            img.instances.push_back(std::move(inst));
        }
        ds.images.push_back(std::move(img));
    }
    return ds;
}

void save_dataset_index(const Dataset& ds) {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& img : ds.images) {
        nlohmann::json jimg;
        jimg["image"] = img.image_path;
        jimg["width"] = img.width;
        jimg["height"] = img.height;
        jimg["instances"] = nlohmann::json::array();
        for (const auto& inst : img.instances) {
            nlohmann::json ji;
            ji["id"] = inst.id;
            ji["label"] = inst.label;
            ji["bbox"] = {inst.bbox.x_min, inst.bbox.y_min, inst.bbox.x_max, inst.bbox.y_max};
            if (!inst.mask_path.empty()) ji["mask"] = inst.mask_path;
            jimg["instances"].push_back(std::move(ji));
        }
        doc.push_back(std::move(jimg));
    }
    spew(ds.root / "index.json", doc.dump(2) + "\n");
}

RleMask load_instance_mask(const Dataset& ds, const DatasetInstance& inst) {
    if (inst.mask_path.empty()) fail(errc::schema, "instance carries no mask path");
    return rle_from_json(slurp(ds.root / inst.mask_path));
}

void save_instance_mask(const Dataset& ds, const DatasetInstance& inst, const RleMask& mask) {
    spew(ds.root / inst.mask_path, rle_to_json(mask) + "\n");
}

} // namespace lotscan
