#include "lotscan/shapefile.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>

#include "lotscan/detail/byteio.hpp"
#include "lotscan/errors.hpp"

namespace lotscan {
namespace {

using detail::ByteReader;
using detail::ByteWriter;

constexpr std::int32_t shp_file_code = 9994;
constexpr std::int32_t shp_version = 1000;
constexpr std::int32_t shape_null = 0;
constexpr std::int32_t shape_polygon = 5;

// .shp and .shx mix byte orders: headers and record headers are big-endian,
// geometry payloads little-endian. Two readers over the same bytes.
struct ShpReaders {
    ByteReader be;
    ByteReader le;
};

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(' ');
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(' ');
    return s.substr(b, e - b + 1);
}

// ---------------------------------------------------------------------------
// .dbf reading
// ---------------------------------------------------------------------------

struct DbfField {
    std::string name;
    char type = 'C';
    std::uint8_t length = 0;
    std::uint8_t decimals = 0;
};

struct DbfTable {
    std::vector<DbfField> fields;
    std::vector<std::vector<AttributeValue>> records;
};

DbfTable parse_dbf(std::span<const std::uint8_t> dbf, std::vector<std::string>* warnings) {
    ByteReader r(dbf, /*big_endian=*/false);
    if (dbf.size() < 33) fail(errc::format, ".dbf too short for a header");
    const std::uint8_t version = r.u8(0);
    if ((version & 0x07) != 0x03)
        fail(errc::format, ".dbf version byte " + std::to_string(version) + " is not dBASE III");
    const std::uint32_t record_count = r.u32(4);
    const std::uint16_t header_size = r.u16(8);
    const std::uint16_t record_size = r.u16(10);

    DbfTable table;
    std::size_t off = 32;
    while (off + 1 <= dbf.size() && r.u8(off) != 0x0D) {
        if (off + 32 > dbf.size()) fail(errc::format, ".dbf field descriptors run past the file");
        DbfField f;
        const auto name_bytes = r.raw(off, 11);
        for (auto c : name_bytes) {
            if (c == 0) break;
            f.name.push_back(static_cast<char>(c));
        }
        f.type = static_cast<char>(r.u8(off + 11));
        f.length = r.u8(off + 16);
        f.decimals = r.u8(off + 17);
        if (f.type != 'C' && f.type != 'N' && f.type != 'F') {
            if (warnings)
                warnings->push_back("field " + f.name + " has type '" + f.type +
                                    "', parsed as raw text");
        }
        table.fields.push_back(std::move(f));
        off += 32;
    }
    if (off >= dbf.size() || r.u8(off) != 0x0D)
        fail(errc::format, ".dbf header lacks the 0x0D terminator");

    std::size_t expected_record = 1;
    for (const auto& f : table.fields) expected_record += f.length;
    if (expected_record != record_size)
        fail(errc::format, ".dbf record size disagrees with the field descriptors");

    for (std::uint32_t rec = 0; rec < record_count; ++rec) {
        const std::size_t base = header_size + static_cast<std::size_t>(rec) * record_size;
        const auto bytes = r.raw(base, record_size);
        std::vector<AttributeValue> row;
        std::size_t pos = 1; // skip deletion flag
        for (const auto& f : table.fields) {
            std::string raw(reinterpret_cast<const char*>(bytes.data() + pos), f.length);
            AttributeValue v;
            v.text = trim(raw);
            if (f.type == 'N' || f.type == 'F') {
                v.kind = AttributeValue::Kind::numeric;
                if (!v.text.empty()) v.number = std::strtod(v.text.c_str(), nullptr);
            }
            row.push_back(std::move(v));
            pos += f.length;
        }
        table.records.push_back(std::move(row));
    }
    return table;
}

// ---------------------------------------------------------------------------
// .shp reading
// ---------------------------------------------------------------------------

void check_shp_header(const ShpReaders& r, std::size_t size, const char* what) {
    if (size < 100) fail(errc::format, std::string(what) + " too short for a header");
    if (static_cast<std::int32_t>(r.be.u32(0)) != shp_file_code)
        fail(errc::format, std::string(what) + " has bad file code");
    if (static_cast<std::int32_t>(r.le.u32(28)) != shp_version)
        fail(errc::format, std::string(what) + " has bad version");
}

PolygonGeom parse_polygon_record(const ByteReader& le, std::size_t content, std::size_t len) {
    const std::uint32_t num_parts = le.u32(content + 36);
    const std::uint32_t num_points = le.u32(content + 40);
    const std::size_t parts_off = content + 44;
    const std::size_t points_off = parts_off + 4ull * num_parts;
    if (44 + 4ull * num_parts + 16ull * num_points > len)
        fail(errc::format, "polygon record overruns its declared length");

    std::vector<std::uint32_t> parts(num_parts);
    for (std::uint32_t p = 0; p < num_parts; ++p) parts[p] = le.u32(parts_off + 4ull * p);

    PolygonGeom geom;
    for (std::uint32_t p = 0; p < num_parts; ++p) {
        const std::uint32_t begin = parts[p];
        const std::uint32_t end = (p + 1 < num_parts) ? parts[p + 1] : num_points;
        if (begin >= end || end > num_points)
            fail(errc::format, "polygon part index array is inconsistent");
        std::vector<Point> ring;
        ring.reserve(end - begin);
        for (std::uint32_t i = begin; i < end; ++i) {
            ring.push_back({le.f64(points_off + 16ull * i), le.f64(points_off + 16ull * i + 8)});
        }
        if (ring.size() < 4 || !(ring.front() == ring.back()))
            fail(errc::format, "polygon ring is not closed or has fewer than 4 points");
        geom.rings.push_back(std::move(ring));
    }
    return geom;
}

// Expected winding: outer rings (even containment depth) clockwise, holes
// counter-clockwise, following the shapefile convention. County data often
// gets this wrong, so violations reorient with a warning.
void normalize_windings(PolygonGeom& g, int record_index, std::vector<std::string>* warnings) {
    for (std::size_t i = 0; i < g.rings.size(); ++i) {
        int depth = 0;
        for (std::size_t j = 0; j < g.rings.size(); ++j) {
            if (j == i) continue;
            // A vertex of a properly nested ring is strictly inside its parent.
            bool inside = false;
            const auto& probe = g.rings[i][0];
            const auto& ring = g.rings[j];
            for (std::size_t k = 0; k + 1 < ring.size(); ++k) {
                const double y1 = ring[k].y, y2 = ring[k + 1].y;
                if ((y1 <= probe.y) == (y2 <= probe.y)) continue;
                const double xi =
                    ring[k].x + (probe.y - y1) * (ring[k + 1].x - ring[k].x) / (y2 - y1);
                if (xi > probe.x) inside = !inside;
            }
            if (inside) ++depth;
        }
        const bool is_hole = depth % 2 == 1;
        const double signed_area = ring_signed_area(g.rings[i]);
        const bool is_ccw = signed_area > 0;
        if (is_hole != is_ccw && signed_area != 0) {
            if (warnings)
                warnings->push_back("record " + std::to_string(record_index) + " ring " +
                                    std::to_string(i) + " wound against convention, reoriented");
            std::reverse(g.rings[i].begin(), g.rings[i].end());
        }
    }
}

} // namespace

std::vector<ParcelFeature> parse_shapefile(std::span<const std::uint8_t> shp,
                                           std::span<const std::uint8_t> shx,
                                           std::span<const std::uint8_t> dbf,
                                           std::vector<std::string>* warnings) {
    ShpReaders r{ByteReader(shp, true), ByteReader(shp, false)};
    check_shp_header(r, shp.size(), ".shp");
    const auto header_type = static_cast<std::int32_t>(r.le.u32(32));
    if (header_type != shape_polygon)
        fail(errc::unsupported_shape,
             "shapefile declares shape type " + std::to_string(header_type) + ", expected 5");

    ShpReaders rx{ByteReader(shx, true), ByteReader(shx, false)};
    check_shp_header(rx, shx.size(), ".shx");
    const std::size_t shx_records = (shx.size() - 100) / 8;

    const DbfTable table = parse_dbf(dbf, warnings);

    const std::size_t shp_words = r.be.u32(24);
    if (shp_words * 2 != shp.size())
        fail(errc::format, ".shp header length disagrees with the file size");

    std::vector<ParcelFeature> features;
    std::size_t off = 100;
    std::size_t record = 0;
    while (off + 8 <= shp.size()) {
        const std::uint32_t content_words = r.be.u32(off + 4);
        const std::size_t content = off + 8;
        const std::size_t content_len = 2ull * content_words;

        if (record >= shx_records)
            fail(errc::consistency, ".shp holds more records than .shx indexes");
        const std::uint32_t shx_offset_words = rx.be.u32(100 + record * 8);
        const std::uint32_t shx_len_words = rx.be.u32(100 + record * 8 + 4);
        if (shx_offset_words * 2ull != off || shx_len_words != content_words)
            fail(errc::consistency, ".shx entry does not address .shp record " +
                                        std::to_string(record));

        const auto shape_type = static_cast<std::int32_t>(r.le.u32(content));
        if (shape_type == shape_polygon) {
            ParcelFeature f;
            f.geometry = parse_polygon_record(r.le, content, content_len);
            normalize_windings(f.geometry, static_cast<int>(record), warnings);
            f.record_index = static_cast<int>(record);
            if (record >= table.records.size())
                fail(errc::consistency, ".shp and .dbf record counts disagree");
            const auto& row = table.records[record];
            for (std::size_t c = 0; c < table.fields.size(); ++c)
                f.attributes.emplace_back(table.fields[c].name, row[c]);
            features.push_back(std::move(f));
        } else if (shape_type != shape_null) {
            fail(errc::unsupported_shape,
                 "record " + std::to_string(record) + " has shape type " +
                     std::to_string(shape_type) + ", expected Polygon or Null");
        }
        off = content + content_len;
        ++record;
    }
    if (record != table.records.size())
        fail(errc::consistency, ".shp has " + std::to_string(record) + " records but .dbf has " +
                                    std::to_string(table.records.size()));
    if (record != shx_records)
        fail(errc::consistency, ".shx indexes a different record count than .shp");
    return features;
}

namespace {

std::vector<std::uint8_t> read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) fail(errc::io, "cannot open " + p.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct Bounds {
    double min_x = std::numeric_limits<double>::infinity();
    double min_y = std::numeric_limits<double>::infinity();
    double max_x = -std::numeric_limits<double>::infinity();
    double max_y = -std::numeric_limits<double>::infinity();

    void expand(const Point& p) {
        min_x = std::min(min_x, p.x);
        min_y = std::min(min_y, p.y);
        max_x = std::max(max_x, p.x);
        max_y = std::max(max_y, p.y);
    }
};

void write_main_header(ByteWriter& w, std::uint32_t file_words, const Bounds& b) {
    ByteWriter be(true);
    be.i32(shp_file_code);
    for (int i = 0; i < 5; ++i) be.u32(0);
    be.u32(file_words);
    w.bytes(be.data());
    w.i32(shp_version);
    w.i32(shape_polygon);
    w.f64(b.min_x);
    w.f64(b.min_y);
    w.f64(b.max_x);
    w.f64(b.max_y);
    for (int i = 0; i < 4; ++i) w.f64(0.0); // Z and M ranges unused
}

struct DbfSchema {
    std::vector<DbfField> fields;
};

// The .dbf schema is rebuilt from the values themselves: width is the widest
// stored text, decimal count the longest fractional part seen.
DbfSchema derive_schema(const std::vector<ParcelFeature>& features) {
    DbfSchema schema;
    for (const auto& [name, first_value] : features.front().attributes) {
        DbfField f;
        f.name = name.substr(0, 10);
        f.type = first_value.kind == AttributeValue::Kind::numeric ? 'N' : 'C';
        std::size_t width = 1;
        std::size_t decimals = 0;
        for (const auto& feat : features) {
            const auto* v = feat.find_attribute(name);
            if (!v) fail(errc::consistency, "features disagree on attribute schema");
            width = std::max(width, v->text.size());
            const auto dot = v->text.find('.');
            if (dot != std::string::npos) decimals = std::max(decimals, v->text.size() - dot - 1);
        }
        f.length = static_cast<std::uint8_t>(std::min<std::size_t>(width, 254));
        f.decimals = f.type == 'N' ? static_cast<std::uint8_t>(decimals) : 0;
        schema.fields.push_back(std::move(f));
    }
    return schema;
}

} // namespace

ShapefileBytes encode_shapefile(const std::vector<ParcelFeature>& features) {
    if (features.empty())
        fail(errc::precondition, "refusing to write a shapefile with no features");

    Bounds file_bounds;
    ByteWriter shp_records(false);
    ByteWriter shx_records(true);
    std::size_t shp_offset_bytes = 100;

    for (std::size_t i = 0; i < features.size(); ++i) {
        const auto& geom = features[i].geometry;
        Bounds b;
        std::size_t num_points = 0;
        for (const auto& ring : geom.rings) {
            for (const auto& p : ring) b.expand(p);
            num_points += ring.size();
        }
        file_bounds.expand({b.min_x, b.min_y});
        file_bounds.expand({b.max_x, b.max_y});

        const std::size_t content_bytes =
            4 + 32 + 4 + 4 + 4 * geom.rings.size() + 16 * num_points;

        ByteWriter rec_header(true);
        rec_header.u32(static_cast<std::uint32_t>(i + 1)); // record numbers are 1-based
        rec_header.u32(static_cast<std::uint32_t>(content_bytes / 2));
        shp_records.bytes(rec_header.data());

        shp_records.i32(shape_polygon);
        shp_records.f64(b.min_x);
        shp_records.f64(b.min_y);
        shp_records.f64(b.max_x);
        shp_records.f64(b.max_y);
        shp_records.u32(static_cast<std::uint32_t>(geom.rings.size()));
        shp_records.u32(static_cast<std::uint32_t>(num_points));
        std::uint32_t start = 0;
        for (const auto& ring : geom.rings) {
            shp_records.u32(start);
            start += static_cast<std::uint32_t>(ring.size());
        }
        for (const auto& ring : geom.rings)
            for (const auto& p : ring) {
                shp_records.f64(p.x);
                shp_records.f64(p.y);
            }

        shx_records.u32(static_cast<std::uint32_t>(shp_offset_bytes / 2));
        shx_records.u32(static_cast<std::uint32_t>(content_bytes / 2));
        shp_offset_bytes += 8 + content_bytes;
    }

    ShapefileBytes out;

    ByteWriter shp(false);
    write_main_header(shp, static_cast<std::uint32_t>(shp_offset_bytes / 2), file_bounds);
    shp.bytes(shp_records.data());
    out.shp = shp.take();

    ByteWriter shx(false);
    write_main_header(shx, static_cast<std::uint32_t>((100 + 8 * features.size()) / 2),
                      file_bounds);
    shx.bytes(shx_records.data());
    out.shx = shx.take();

    const DbfSchema schema = derive_schema(features);
    ByteWriter dbf(false);
    dbf.u8(0x03);
    dbf.u8(95); // static update stamp keeps output byte-reproducible
    dbf.u8(7);
    dbf.u8(26);
    dbf.u32(static_cast<std::uint32_t>(features.size()));
    std::uint16_t record_size = 1;
    for (const auto& f : schema.fields) record_size += f.length;
    dbf.u16(static_cast<std::uint16_t>(32 + 32 * schema.fields.size() + 1));
    dbf.u16(record_size);
    for (int i = 0; i < 20; ++i) dbf.u8(0);
    for (const auto& f : schema.fields) {
        char name[11] = {};
        std::memcpy(name, f.name.data(), std::min<std::size_t>(f.name.size(), 10));
        dbf.bytes({reinterpret_cast<const std::uint8_t*>(name), 11});
        dbf.u8(static_cast<std::uint8_t>(f.type));
        for (int i = 0; i < 4; ++i) dbf.u8(0);
        dbf.u8(f.length);
        dbf.u8(f.decimals);
        for (int i = 0; i < 14; ++i) dbf.u8(0);
    }
    dbf.u8(0x0D);
    for (const auto& feat : features) {
        dbf.u8(' ');
        for (const auto& f : schema.fields) {
            const auto* v = feat.find_attribute(f.name);
            std::string cell = v ? v->text : std::string{};
            if (cell.size() > f.length) cell.resize(f.length);
            if (f.type == 'N') // numeric cells are right-justified
                cell.insert(0, f.length - cell.size(), ' ');
            else
                cell.append(f.length - cell.size(), ' ');
            dbf.bytes({reinterpret_cast<const std::uint8_t*>(cell.data()), cell.size()});
        }
    }
    dbf.u8(0x1A);
    out.dbf = dbf.take();
    return out;
}

std::vector<ParcelFeature> load_shapefile(const std::filesystem::path& shp_path,
                                          std::vector<std::string>* warnings) {
    auto shx_path = shp_path;
    shx_path.replace_extension(".shx");
    auto dbf_path = shp_path;
    dbf_path.replace_extension(".dbf");
    const auto shp = read_file(shp_path);
    const auto shx = read_file(shx_path);
    const auto dbf = read_file(dbf_path);
    return parse_shapefile(shp, shx, dbf, warnings);
}

void write_subset_shapefile(const std::vector<ParcelFeature>& features,
                            const std::filesystem::path& shp_path,
                            const std::filesystem::path& shx_path,
                            const std::filesystem::path& dbf_path) {
    const ShapefileBytes bytes = encode_shapefile(features);
    const auto dump = [](const std::filesystem::path& p, const std::vector<std::uint8_t>& b) {
        std::ofstream out(p, std::ios::binary | std::ios::trunc);
        if (!out) fail(errc::io, "cannot open " + p.string() + " for writing");
        out.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
        if (!out) fail(errc::io, "short write to " + p.string());
    };
    dump(shp_path, bytes.shp);
    dump(shx_path, bytes.shx);
    dump(dbf_path, bytes.dbf);
}

bool AttributePredicate::matches(const ParcelFeature& f) const {
    const AttributeValue* v = f.find_attribute(field);
    if (!v) fail(errc::field, "feature has no attribute named \"" + field + "\"");
    switch (op) {
        case Op::eq:
        case Op::ne: {
            bool equal;
            if (v->kind == AttributeValue::Kind::numeric && !v->text.empty()) {
                char* end = nullptr;
                const double rhs = std::strtod(value.c_str(), &end);
                equal = (end && *end == '\0') ? v->number == rhs : v->text == value;
            } else {
                equal = v->text == value;
            }
            return op == Op::eq ? equal : !equal;
        }
        case Op::contains:
            return v->text.find(value) != std::string::npos;
        case Op::lt:
        case Op::gt: {
            const double lhs = v->kind == AttributeValue::Kind::numeric
                                   ? v->number
                                   : std::strtod(v->text.c_str(), nullptr);
            const double rhs = std::strtod(value.c_str(), nullptr);
            return op == Op::lt ? lhs < rhs : lhs > rhs;
        }
    }
    return false;
}

AttributePredicate parse_predicate(const std::string& text) {
    // The first operator character ends the field name; "!=" is matched
    // before "=" at the same position. Later occurrences belong to the value.
    for (std::size_t i = 1; i < text.size(); ++i) {
        AttributePredicate p;
        p.field = text.substr(0, i);
        if (text.compare(i, 2, "!=") == 0) {
            p.op = AttributePredicate::Op::ne;
            p.value = text.substr(i + 2);
            return p;
        }
        switch (text[i]) {
            case '=': p.op = AttributePredicate::Op::eq; break;
            case '~': p.op = AttributePredicate::Op::contains; break;
            case '<': p.op = AttributePredicate::Op::lt; break;
            case '>': p.op = AttributePredicate::Op::gt; break;
            default: continue;
        }
        p.value = text.substr(i + 1);
        return p;
    }
    fail(errc::schema, "cannot parse predicate \"" + text + "\" (expected FIELD[=|!=|~|<|>]VALUE)");
}

std::vector<ParcelFeature> filter_features(const std::vector<ParcelFeature>& features,
                                           const AttributePredicate& predicate) {
    std::vector<ParcelFeature> out;
    for (const auto& f : features)
        if (predicate.matches(f)) out.push_back(f);
    return out;
}

} // namespace lotscan
