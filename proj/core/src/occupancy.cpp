#include "lotscan/occupancy.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

#include "lotscan/errors.hpp"

namespace lotscan {
namespace {

// Shared assignment logic over a coverage matrix [vehicle][space].
OccupancyReport report_from_coverage(const std::vector<std::vector<double>>& coverage,
                                     std::size_t n_spaces, double threshold) {
    if (!(threshold > 0.0 && threshold <= 1.0))
        fail(errc::precondition, "occupancy threshold must lie in (0, 1]");

    OccupancyReport report;
    report.total_spaces = n_spaces;
    report.spaces.resize(n_spaces);
    for (std::size_t s = 0; s < n_spaces; ++s) report.spaces[s].space_id = static_cast<int>(s);

    for (std::size_t v = 0; v < coverage.size(); ++v) {
        // Argmax over spaces, lower index winning ties; zero coverage means
        // the vehicle touches no space and stays unassigned.
        double best = 0.0;
        int best_space = -1;
        for (std::size_t s = 0; s < n_spaces; ++s) {
            if (coverage[v][s] > best) {
                best = coverage[v][s];
                best_space = static_cast<int>(s);
            }
        }
        if (best_space < 0) continue;
        auto& space = report.spaces[static_cast<std::size_t>(best_space)];
        space.covering_vehicle_ids.push_back(static_cast<int>(v));
        space.coverage_fraction = std::max(space.coverage_fraction, best);
        if (best >= threshold) space.occupied = true;
    }

    for (const auto& s : report.spaces)
        if (s.occupied) ++report.occupied_count;
    report.utilization = report.total_spaces
                             ? static_cast<double>(report.occupied_count) / report.total_spaces
                             : 0.0;
    return report;
}

} // namespace

OccupancyReport assess_occupancy(const std::vector<RleMask>& spaces,
                                 const std::vector<RleMask>& vehicles, double threshold) {
    if (!spaces.empty()) {
        const auto w = spaces.front().width, h = spaces.front().height;
        for (const auto& m : spaces)
            if (m.width != w || m.height != h)
                fail(errc::precondition, "space masks must share dimensions");
        for (const auto& m : vehicles)
            if (m.width != w || m.height != h)
                fail(errc::precondition, "vehicle and space masks must share dimensions");
    }
    std::vector<std::vector<double>> coverage(vehicles.size(),
                                              std::vector<double>(spaces.size(), 0.0));
    for (std::size_t v = 0; v < vehicles.size(); ++v) {
        const std::int64_t v_area = mask_area(vehicles[v]);
        if (v_area == 0) continue;
        for (std::size_t s = 0; s < spaces.size(); ++s)
            coverage[v][s] = static_cast<double>(rle_intersection_area(vehicles[v], spaces[s])) /
                             static_cast<double>(v_area);
    }
    return report_from_coverage(coverage, spaces.size(), threshold);
}

OccupancyReport occupancy_from_bboxes(const std::vector<BBox>& spaces,
                                      const std::vector<BBox>& vehicles, double threshold) {
    std::vector<std::vector<double>> coverage(vehicles.size(),
                                              std::vector<double>(spaces.size(), 0.0));
    for (std::size_t v = 0; v < vehicles.size(); ++v) {
        const double v_area = vehicles[v].area();
        if (v_area <= 0.0) continue;
        for (std::size_t s = 0; s < spaces.size(); ++s)
            coverage[v][s] = intersection_area(vehicles[v], spaces[s]) / v_area;
    }
    return report_from_coverage(coverage, spaces.size(), threshold);
}

std::string OccupancyReport::to_json() const {
    nlohmann::json doc;
    doc["total_spaces"] = total_spaces;
    doc["occupied_count"] = occupied_count;
    doc["utilization"] = utilization;
    doc["spaces"] = nlohmann::json::array();
    for (const auto& s : spaces) {
        doc["spaces"].push_back({{"space_id", s.space_id},
                                 {"occupied", s.occupied},
                                 {"covering_vehicle_ids", s.covering_vehicle_ids},
                                 {"coverage_fraction", s.coverage_fraction}});
    }
    return doc.dump(2) + "\n";
}

std::string OccupancyReport::to_csv() const {
    std::string out = "space_id,occupied,coverage\n";
    char line[64];
    for (const auto& s : spaces) {
        std::snprintf(line, sizeof line, "%d,%s,%.6f\n", s.space_id,
                      s.occupied ? "true" : "false", s.coverage_fraction);
        out += line;
    }
    return out;
}

GeoRaster occupancy_overlay(const GeoRaster& base, const std::vector<RleMask>& spaces,
                            const OccupancyReport& report) {
    GeoRaster out = base;
    if (out.band_count != 3) fail(errc::precondition, "overlay needs a 3-band base image");

    for (std::size_t s = 0; s < spaces.size(); ++s) {
        const BitMask mask = rle_decode(spaces[s]);
        if (mask.width != out.width || mask.height != out.height)
            fail(errc::precondition, "space mask dimensions must match the base image");
        const bool occupied =
            s < report.spaces.size() && report.spaces[s].occupied;
        const std::uint8_t red = occupied ? 220 : 30;
        const std::uint8_t green = occupied ? 30 : 200;
        for (std::int64_t y = 0; y < mask.height; ++y)
            for (std::int64_t x = 0; x < mask.width; ++x) {
                if (!mask.get(x, y)) continue;
                // Outline: a set pixel with an unset (or off-canvas) 4-neighbor.
                const bool boundary = x == 0 || y == 0 || x == mask.width - 1 ||
                                      y == mask.height - 1 || !mask.get(x - 1, y) ||
                                      !mask.get(x + 1, y) || !mask.get(x, y - 1) ||
                                      !mask.get(x, y + 1);
                if (!boundary) continue;
                const std::size_t i = out.sample_index(x, y, 0);
                out.pixels[i] = red;
                out.pixels[i + 1] = green;
                out.pixels[i + 2] = 30;
            }
    }
    return out;
}

} // namespace lotscan
