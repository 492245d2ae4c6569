#pragma once
#include <stdexcept>
#include <string>

namespace lotscan {

// Every failure the library reports falls into one of these categories.
// The CLI maps them onto exit codes; tests assert on them.
enum class errc {
    format,              // malformed container bytes (TIFF/PNG/shapefile/JSON)
    georeferencing,      // raster lacks the tags needed for a geotransform
    unsupported_feature, // valid file, but outside the supported subset
    incompatible_grid,   // rasters disagree on pixel size or CRS
    alignment,           // rasters not on a shared integer grid
    empty_window,        // requested window does not intersect the raster
    incompatible_crs,    // vector and raster CRS codes differ
    unsupported_shape,   // shapefile shape type outside Polygon/Null
    consistency,         // cross-file record counts or run sums disagree
    field,               // predicate references an unknown attribute field
    schema,              // document structure violates the expected schema
    label,               // annotation label outside the fixed vocabulary
    precondition,        // caller violated a documented precondition
    io,                  // filesystem failure
};

const char* errc_name(errc c) noexcept;

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    [[nodiscard]] errc code() const noexcept { return code_; }

private:
    errc code_;
};

inline const char* errc_name(errc c) noexcept {
    switch (c) {
        case errc::format:              return "format error";
        case errc::georeferencing:      return "georeferencing error";
        case errc::unsupported_feature: return "unsupported feature";
        case errc::incompatible_grid:   return "incompatible grid";
        case errc::alignment:           return "alignment error";
        case errc::empty_window:        return "empty window";
        case errc::incompatible_crs:    return "incompatible crs";
        case errc::unsupported_shape:   return "unsupported shape";
        case errc::consistency:         return "consistency error";
        case errc::field:               return "unknown field";
        case errc::schema:              return "schema error";
        case errc::label:               return "label error";
        case errc::precondition:        return "precondition violated";
        case errc::io:                  return "i/o error";
    }
    return "error";
}

[[noreturn]] inline void fail(errc code, const std::string& message) {
    throw Error(code, message);
}

} // namespace lotscan
