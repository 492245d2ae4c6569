#pragma once
#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lotscan/bitmask.hpp"
#include "lotscan/raster.hpp"
#include "lotscan/shapefile.hpp"

namespace lotscan {

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
};

struct ParcelCrop {
    GeoRaster image; // bbox window of the parcel, background outside the polygon
    BitMask mask;    // parcel coverage within the window
};

// Cuts the parcel's bounding-box window out of the raster and blanks pixels
// outside the polygon to `background`. Pixels inside the polygon are copied
// bit-exactly, never resampled. parcel_crs is the shapefile's CRS code when
// known (shapefiles carry none themselves); 0 matches anything.
ParcelCrop crop_parcel(const GeoRaster& r, const ParcelFeature& f, Rgb background = {},
                       std::int32_t parcel_crs = 0, std::vector<std::string>* warnings = nullptr);

struct ManifestEntry {
    int record_index = 0;
    std::int64_t col0 = 0, row0 = 0, width = 0, height = 0;
    std::array<double, 4> world_bbox{}; // minx, miny, maxx, maxy
    std::string png_path;
    std::string status; // "ok" or an error description
};

struct ExtractManifest {
    std::vector<ManifestEntry> entries; // sorted by record_index
    std::size_t failed = 0;

    [[nodiscard]] std::string to_json() const;
};

struct ExtractOptions {
    Rgb background{};
    std::int32_t shapefile_crs = 0; // 0 = unknown, matches any raster CRS
    unsigned jobs = 1;
};

// The preprocessing pipeline over files: mosaic the rasters, parse and
// filter the parcel features, crop each match and write it as a PNG named
// by record index. Per-parcel failures land in the manifest; the batch
// itself never aborts on them.
ExtractManifest extract_all(const std::vector<std::filesystem::path>& raster_paths,
                            const std::filesystem::path& shp_path,
                            const AttributePredicate* predicate,
                            const std::filesystem::path& out_dir,
                            const ExtractOptions& options = {});

} // namespace lotscan
