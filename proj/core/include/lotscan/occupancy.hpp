#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "lotscan/bbox.hpp"
#include "lotscan/raster.hpp"
#include "lotscan/rle.hpp"

namespace lotscan {

struct SpaceOccupancy {
    int space_id = 0;
    bool occupied = false;
    std::vector<int> covering_vehicle_ids; // vehicles assigned to this space
    double coverage_fraction = 0.0;        // best assigned coverage, 0 if none
};

struct OccupancyReport {
    std::vector<SpaceOccupancy> spaces;
    std::size_t total_spaces = 0;
    std::size_t occupied_count = 0;
    double utilization = 0.0; // occupied_count / total_spaces, 0 for an empty lot

    [[nodiscard]] std::string to_json() const;
    [[nodiscard]] std::string to_csv() const; // space_id,occupied,coverage
};

// Mask-level occupancy: coverage(v,s) = |v n s| / |v|, each vehicle assigned
// to its argmax-coverage space (ties to the lower space index), a space
// occupied when an assigned vehicle covers it at or above the threshold.
// Coverage normalizes by vehicle area so a small car inside a large space
// still counts.
OccupancyReport assess_occupancy(const std::vector<RleMask>& spaces,
                                 const std::vector<RleMask>& vehicles, double threshold = 0.5);

// Same rule on plain boxes; the coarse baseline mask occupancy improves on.
OccupancyReport occupancy_from_bboxes(const std::vector<BBox>& spaces,
                                      const std::vector<BBox>& vehicles, double threshold = 0.5);

// Renders space outlines over `base` (red when occupied, green when free).
GeoRaster occupancy_overlay(const GeoRaster& base, const std::vector<RleMask>& spaces,
                            const OccupancyReport& report);

} // namespace lotscan
