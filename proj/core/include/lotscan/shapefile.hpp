#pragma once
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "lotscan/polygon.hpp"

namespace lotscan {

// One attribute cell. The trimmed on-disk text is kept verbatim so a
// parse -> write -> parse cycle reproduces records exactly; numeric fields
// additionally carry their parsed value.
struct AttributeValue {
    enum class Kind { text, numeric };
    Kind kind = Kind::text;
    std::string text;    // dBASE padding stripped
    double number = 0.0; // valid when kind == numeric and text non-empty

    friend bool operator==(const AttributeValue& a, const AttributeValue& b) {
        return a.kind == b.kind && a.text == b.text;
    }
};

struct ParcelFeature {
    PolygonGeom geometry;
    std::vector<std::pair<std::string, AttributeValue>> attributes; // .dbf field order
    int record_index = 0; // 0-based position in the source shapefile

    [[nodiscard]] const AttributeValue* find_attribute(const std::string& name) const {
        for (const auto& [k, v] : attributes)
            if (k == name) return &v;
        return nullptr;
    }
};

// Parses the .shp/.shx/.dbf triple of a Polygon shapefile. Null-shape
// records are skipped (their record_index is not reused). Ring windings are
// normalized to outer-clockwise / hole-counter-clockwise; files violating
// the convention are reoriented with a warning rather than rejected.
std::vector<ParcelFeature> parse_shapefile(std::span<const std::uint8_t> shp,
                                           std::span<const std::uint8_t> shx,
                                           std::span<const std::uint8_t> dbf,
                                           std::vector<std::string>* warnings = nullptr);

std::vector<ParcelFeature> load_shapefile(const std::filesystem::path& shp_path,
                                          std::vector<std::string>* warnings = nullptr);

struct ShapefileBytes {
    std::vector<std::uint8_t> shp;
    std::vector<std::uint8_t> shx;
    std::vector<std::uint8_t> dbf;
};

// Serializes features into a shapefile triple readable by parse_shapefile:
// coordinates bit-exact, header bounding boxes recomputed, .dbf schema
// reconstructed from the attribute values.
ShapefileBytes encode_shapefile(const std::vector<ParcelFeature>& features);

void write_subset_shapefile(const std::vector<ParcelFeature>& features,
                            const std::filesystem::path& shp_path,
                            const std::filesystem::path& shx_path,
                            const std::filesystem::path& dbf_path);

// Attribute predicate: =, !=, ~ (contains), < and > (numeric).
struct AttributePredicate {
    enum class Op { eq, ne, contains, lt, gt };
    std::string field;
    Op op = Op::eq;
    std::string value;

    [[nodiscard]] bool matches(const ParcelFeature& f) const;
};

// Parses "FIELD=V", "FIELD!=V", "FIELD~V", "FIELD<V", "FIELD>V".
AttributePredicate parse_predicate(const std::string& text);

// Order-preserving subset of features matching the predicate. The predicate
// field must exist in the features' schema.
std::vector<ParcelFeature> filter_features(const std::vector<ParcelFeature>& features,
                                           const AttributePredicate& predicate);

} // namespace lotscan
