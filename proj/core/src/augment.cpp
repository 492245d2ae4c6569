#include "lotscan/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lotscan/errors.hpp"
#include "lotscan/parallel.hpp"
#include "lotscan/png_io.hpp"
#include "lotscan/rng.hpp"

namespace lotscan {
namespace {

struct InverseRotation {
    double cos_t, sin_t, cx, cy;

    // Source point whose value lands on output pixel center (x+0.5, y+0.5).
    [[nodiscard]] std::pair<double, double> source(std::int64_t x, std::int64_t y) const {
        const double dx = static_cast<double>(x) + 0.5 - cx;
        const double dy = static_cast<double>(y) + 0.5 - cy;
        return {cx + cos_t * dx + sin_t * dy, cy - sin_t * dx + cos_t * dy};
    }
};

double bilinear_band(const GeoRaster& img, int band, double u, double v) {
    // u,v are in cell-center coordinates; cells outside the canvas read 0.
    const auto x0 = static_cast<std::int64_t>(std::floor(u));
    const auto y0 = static_cast<std::int64_t>(std::floor(v));
    const double fx = u - static_cast<double>(x0);
    const double fy = v - static_cast<double>(y0);
    const auto sample = [&](std::int64_t x, std::int64_t y) -> double {
        if (x < 0 || y < 0 || x >= img.width || y >= img.height) return 0.0;
        return img.at(x, y, band);
    };
    const double top = (1.0 - fx) * sample(x0, y0) + fx * sample(x0 + 1, y0);
    const double bot = (1.0 - fx) * sample(x0, y0 + 1) + fx * sample(x0 + 1, y0 + 1);
    return (1.0 - fy) * top + fy * bot;
}

} // namespace

std::pair<GeoRaster, std::vector<BitMask>> rotate(const GeoRaster& image,
                                                  const std::vector<BitMask>& masks,
                                                  double theta_deg) {
    for (const auto& m : masks)
        if (m.width != image.width || m.height != image.height)
            fail(errc::precondition, "mask dimensions must match the image");

    const double theta = theta_deg * std::numbers::pi / 180.0;
    const InverseRotation inv{std::cos(theta), std::sin(theta),
                              static_cast<double>(image.width) / 2.0,
                              static_cast<double>(image.height) / 2.0};

    GeoRaster out_img = make_raster(image.width, image.height, image.band_count, image.transform);
    std::vector<BitMask> out_masks(masks.size());
    for (auto& m : out_masks) m = BitMask(image.width, image.height);

    for (std::int64_t y = 0; y < image.height; ++y) {
        for (std::int64_t x = 0; x < image.width; ++x) {
            const auto [sx, sy] = inv.source(x, y);
            for (int b = 0; b < image.band_count; ++b) {
                const double v = bilinear_band(image, b, sx - 0.5, sy - 0.5);
                out_img.pixels[out_img.sample_index(x, y, b)] =
                    static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
            }
            const auto nx = static_cast<std::int64_t>(std::floor(sx));
            const auto ny = static_cast<std::int64_t>(std::floor(sy));
            if (nx >= 0 && ny >= 0 && nx < image.width && ny < image.height)
                for (std::size_t m = 0; m < masks.size(); ++m)
                    if (masks[m].get(nx, ny)) out_masks[m].set(x, y);
        }
    }
    return {std::move(out_img), std::move(out_masks)};
}

std::pair<GeoRaster, std::vector<BitMask>> flip_vertical(const GeoRaster& image,
                                                         const std::vector<BitMask>& masks) {
    GeoRaster out_img = image;
    const std::size_t stride = static_cast<std::size_t>(image.width) * image.band_count;
    for (std::int64_t y = 0; y < image.height; ++y)
        std::copy_n(image.pixels.begin() + static_cast<std::ptrdiff_t>(y * stride), stride,
                    out_img.pixels.begin() +
                        static_cast<std::ptrdiff_t>((image.height - 1 - y) * stride));

    std::vector<BitMask> out_masks = masks;
    for (std::size_t m = 0; m < masks.size(); ++m)
        for (std::int64_t y = 0; y < masks[m].height; ++y)
            std::copy_n(masks[m].bits.begin() + y * masks[m].width, masks[m].width,
                        out_masks[m].bits.begin() + (masks[m].height - 1 - y) * masks[m].width);
    return {std::move(out_img), std::move(out_masks)};
}

BBox mask_to_bbox(const BitMask& mask) {
    std::int64_t min_c = mask.width, min_r = mask.height, max_c = -1, max_r = -1;
    for (std::int64_t y = 0; y < mask.height; ++y)
        for (std::int64_t x = 0; x < mask.width; ++x)
            if (mask.get(x, y)) {
                min_c = std::min(min_c, x);
                min_r = std::min(min_r, y);
                max_c = std::max(max_c, x);
                max_r = std::max(max_r, y);
            }
    if (max_c < 0) return {};
    return {static_cast<double>(min_c), static_cast<double>(min_r),
            static_cast<double>(max_c + 1), static_cast<double>(max_r + 1)};
}

namespace {

std::string stem_of(const std::string& rel_path) {
    return std::filesystem::path(rel_path).stem().string();
}

} // namespace

Dataset expand_dataset(const Dataset& input, const std::filesystem::path& out_root,
                       const AugmentConfig& cfg, unsigned jobs) {
    if (cfg.per_image_outputs < 0)
        fail(errc::precondition, "per_image_outputs must be non-negative");
    if (std::abs(cfg.rotation_min_deg) > 180.0 || std::abs(cfg.rotation_max_deg) > 180.0 ||
        cfg.rotation_min_deg > cfg.rotation_max_deg)
        fail(errc::precondition, "rotation range must be ordered and within +-180 degrees");

    std::filesystem::create_directories(out_root / "images");
    std::filesystem::create_directories(out_root / "masks");

    const int variants = cfg.per_image_outputs;
    // Slot layout: source i occupies [i*(variants+1), (i+1)*(variants+1)).
    std::vector<DatasetImage> slots(input.images.size() * (variants + 1));

    Dataset out;
    out.root = out_root;

    parallel_for(input.images.size(), jobs, [&](std::size_t i) {
        const DatasetImage& src = input.images[i];
        const std::string stem = stem_of(src.image_path);

        // Pass the original through untouched.
        std::filesystem::copy_file(input.root / src.image_path,
                                   out_root / "images" / (stem + ".png"),
                                   std::filesystem::copy_options::overwrite_existing);
        DatasetImage original = src;
        original.image_path = "images/" + stem + ".png";
        for (auto& inst : original.instances) {
            const RleMask m = load_instance_mask(input, inst);
            DatasetInstance moved = inst;
            moved.mask_path = "masks/" + stem + "_" + std::to_string(inst.id) + ".rle.json";
            save_instance_mask(out, moved, m);
            inst = moved;
        }
        slots[i * (variants + 1)] = std::move(original);

        if (variants == 0) return;

        const GeoRaster image = load_png(input.root / src.image_path);
        std::vector<BitMask> masks;
        masks.reserve(src.instances.size());
        for (const auto& inst : src.instances)
            masks.push_back(rle_decode(load_instance_mask(input, inst)));

        for (int k = 0; k < variants; ++k) {
            SplitMix64 rng = substream(cfg.seed, stem, static_cast<std::uint64_t>(k));
            const double theta = cfg.rotation_min_deg +
                                 rng.next_double() * (cfg.rotation_max_deg - cfg.rotation_min_deg);
            const bool do_flip = cfg.vertical_flip && rng.next_bool();

            auto [img_v, masks_v] = rotate(image, masks, theta);
            if (do_flip) std::tie(img_v, masks_v) = flip_vertical(img_v, masks_v);

            const std::string vstem = stem + "_aug" + std::to_string(k);
            DatasetImage variant;
            variant.image_path = "images/" + vstem + ".png";
            variant.width = src.width;
            variant.height = src.height;
            write_png(img_v, out_root / variant.image_path);

            for (std::size_t m = 0; m < masks_v.size(); ++m) {
                // Instances rotated fully off the canvas are dropped.
                if (masks_v[m].popcount() == 0) continue;
                const BBox bb = mask_to_bbox(masks_v[m]);
                DatasetInstance inst;
                inst.id = src.instances[m].id;
                inst.label = src.instances[m].label;
                inst.bbox = bb;
                inst.mask_path = "masks/" + vstem + "_" + std::to_string(inst.id) + ".rle.json";
                save_instance_mask(out, inst, rle_encode(masks_v[m]));
                variant.instances.push_back(std::move(inst));
            }
            slots[i * (variants + 1) + 1 + k] = std::move(variant);
        }
    });

    out.images = std::move(slots);
    save_dataset_index(out);
    return out;
}

} // namespace lotscan
