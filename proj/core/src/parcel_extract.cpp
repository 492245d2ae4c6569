#include "lotscan/parcel_extract.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include "lotscan/errors.hpp"
#include "lotscan/geotiff.hpp"
#include "lotscan/parallel.hpp"
#include "lotscan/png_io.hpp"
#include "lotscan/rasterize.hpp"

namespace lotscan {
namespace {

struct PixelBounds {
    std::int64_t col0, row0, col1, row1; // half-open
};

PixelBounds polygon_pixel_bounds(const PolygonGeom& g, const GeoTransform& t) {
    double min_c = std::numeric_limits<double>::infinity(), min_r = min_c;
    double max_c = -min_c, max_r = -min_c;
    for (const auto& ring : g.rings)
        for (const auto& p : ring) {
            const PixelXY px = world_to_pixel(t, p.x, p.y);
            min_c = std::min(min_c, px.col);
            min_r = std::min(min_r, px.row);
            max_c = std::max(max_c, px.col);
            max_r = std::max(max_r, px.row);
        }
    return {static_cast<std::int64_t>(std::floor(min_c)),
            static_cast<std::int64_t>(std::floor(min_r)),
            static_cast<std::int64_t>(std::ceil(max_c)),
            static_cast<std::int64_t>(std::ceil(max_r))};
}

} // namespace

ParcelCrop crop_parcel(const GeoRaster& r, const ParcelFeature& f, Rgb background,
                       std::int32_t parcel_crs, std::vector<std::string>* warnings) {
    // CRS codes must agree; 0 (unknown) pairs with anything, but gets flagged.
    if (parcel_crs != 0 && r.transform.crs_code != 0 && parcel_crs != r.transform.crs_code)
        fail(errc::incompatible_crs,
             "parcel CRS " + std::to_string(parcel_crs) + " does not match raster CRS " +
                 std::to_string(r.transform.crs_code));
    if ((parcel_crs == 0 || r.transform.crs_code == 0) && warnings)
        warnings->push_back("CRS unknown on one side, assuming shared coordinates");

    const PixelBounds b = polygon_pixel_bounds(f.geometry, r.transform);
    GeoRaster window = read_window(r, b.col0, b.row0, b.col1 - b.col0, b.row1 - b.row0);

    BitMask mask = rasterize_polygon(f.geometry, window.transform, window.width, window.height);
    ParcelCrop crop{std::move(window), std::move(mask)};
    for (std::int64_t y = 0; y < crop.image.height; ++y)
        for (std::int64_t x = 0; x < crop.image.width; ++x)
            if (!crop.mask.get(x, y)) {
                const std::size_t i = crop.image.sample_index(x, y, 0);
                crop.image.pixels[i] = background.r;
                crop.image.pixels[i + 1] = background.g;
                crop.image.pixels[i + 2] = background.b;
            }
    return crop;
}

std::string ExtractManifest::to_json() const {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& e : entries) {
        nlohmann::json j;
        j["record_index"] = e.record_index;
        j["window"] = {{"col0", e.col0}, {"row0", e.row0}, {"w", e.width}, {"h", e.height}};
        j["world_bbox"] = e.world_bbox;
        j["png_path"] = e.png_path;
        j["status"] = e.status;
        doc.push_back(std::move(j));
    }
    return doc.dump(2) + "\n";
}

ExtractManifest extract_all(const std::vector<std::filesystem::path>& raster_paths,
                            const std::filesystem::path& shp_path,
                            const AttributePredicate* predicate,
                            const std::filesystem::path& out_dir,
                            const ExtractOptions& options) {
    std::vector<GeoRaster> rasters;
    rasters.reserve(raster_paths.size());
    for (const auto& p : raster_paths) rasters.push_back(load_geotiff(p));
    const GeoRaster stitched = mosaic(rasters);
    rasters.clear();

    std::vector<ParcelFeature> features = load_shapefile(shp_path);
    if (predicate) features = filter_features(features, *predicate);

    std::filesystem::create_directories(out_dir);

    std::vector<ManifestEntry> entries(features.size());
    parallel_for(features.size(), options.jobs, [&](std::size_t i) {
        const ParcelFeature& f = features[i];
        ManifestEntry& e = entries[i];
        e.record_index = f.record_index;
        try {
            const ParcelCrop crop =
                crop_parcel(stitched, f, options.background, options.shapefile_crs);
            e.col0 = static_cast<std::int64_t>(std::llround(
                (crop.image.transform.origin_x - stitched.transform.origin_x) /
                stitched.transform.pixel_size_x));
            e.row0 = static_cast<std::int64_t>(std::llround(
                (stitched.transform.origin_y - crop.image.transform.origin_y) /
                stitched.transform.pixel_size_y));
            e.width = crop.image.width;
            e.height = crop.image.height;
            const auto world_lo = pixel_to_world(crop.image.transform, 0, crop.image.height);
            const auto world_hi = pixel_to_world(crop.image.transform, crop.image.width, 0);
            e.world_bbox = {world_lo.x, world_lo.y, world_hi.x, world_hi.y};
            const std::string name = "parcel_" + std::to_string(f.record_index) + ".png";
            write_png(crop.image, out_dir / name);
            e.png_path = name; // manifest paths are out_dir-relative
            e.status = "ok";
        } catch (const Error& err) {
            e.status = err.what();
        }
    });

    ExtractManifest manifest;
    manifest.entries = std::move(entries);
    std::sort(manifest.entries.begin(), manifest.entries.end(),
              [](const ManifestEntry& a, const ManifestEntry& b) {
                  return a.record_index < b.record_index;
              });
    for (const auto& e : manifest.entries)
        if (e.status != "ok") ++manifest.failed;
    return manifest;
}

} // namespace lotscan
