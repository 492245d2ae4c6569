#pragma once
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lotscan/bbox.hpp"
#include "lotscan/rle.hpp"

namespace lotscan {

// On-disk dataset layout:
//   <root>/images/<stem>.png
//   <root>/masks/<stem>_<id>.rle.json
//   <root>/index.json   -- [{image, width, height, instances:[...]}]
struct DatasetInstance {
    int id = 0;
    std::string label;
    BBox bbox;
    std::string mask_path; // relative to the dataset root
};

struct DatasetImage {
    std::string image_path; // relative to the dataset root
    std::int64_t width = 0;
    std::int64_t height = 0;
    std::vector<DatasetInstance> instances;
};

struct Dataset {
    std::filesystem::path root;
    std::vector<DatasetImage> images;
};

Dataset load_dataset(const std::filesystem::path& root);

// Writes index.json for the images listed; mask/image files are written by
// whoever produced them.
void save_dataset_index(const Dataset& ds);

RleMask load_instance_mask(const Dataset& ds, const DatasetInstance& inst);
void save_instance_mask(const Dataset& ds, const DatasetInstance& inst, const RleMask& mask);

} // namespace lotscan
