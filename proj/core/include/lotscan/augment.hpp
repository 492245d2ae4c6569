#pragma once
#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "lotscan/bbox.hpp"
#include "lotscan/bitmask.hpp"
#include "lotscan/dataset.hpp"
#include "lotscan/raster.hpp"

namespace lotscan {

struct AugmentConfig {
    double rotation_min_deg = -50.0;
    double rotation_max_deg = 50.0;
    bool vertical_flip = true;
    int per_image_outputs = 2;
    std::uint64_t seed = 0;
};

// Rotates image and masks jointly about the image center, keeping the canvas
// size (corners rotate out, uncovered corners become black/0). Image samples
// are bilinear, mask samples nearest-neighbor so masks stay binary.
// theta == 0 reproduces the inputs bit-exactly.
std::pair<GeoRaster, std::vector<BitMask>> rotate(const GeoRaster& image,
                                                  const std::vector<BitMask>& masks,
                                                  double theta_deg);

// Reverses row order, exactly. Applying it twice is the identity.
std::pair<GeoRaster, std::vector<BitMask>> flip_vertical(const GeoRaster& image,
                                                         const std::vector<BitMask>& masks);

// Pixel-extent box of the mask's set pixels: (min_col, min_row) to
// (max_col+1, max_row+1). Empty mask gives a zero box.
BBox mask_to_bbox(const BitMask& mask);

// Grows the dataset: each source image is copied through unchanged and gets
// cfg.per_image_outputs variants named <stem>_aug<k>.png, each drawn from an
// independent per-(image,variant) random stream: rotation uniform over the
// configured range, then a coin-flip vertical flip when enabled. Instance
// bboxes are recomputed from the transformed masks. The same (dataset, cfg)
// produces byte-identical output regardless of `jobs`.
Dataset expand_dataset(const Dataset& input, const std::filesystem::path& out_root,
                       const AugmentConfig& cfg, unsigned jobs = 1);

} // namespace lotscan
