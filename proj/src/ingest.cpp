#include "quakedss/ingest.hpp"

#include "quakedss/csv.hpp"
#include "quakedss/error.hpp"
#include "quakedss/json_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace quakedss::ingest {

namespace {

std::string json_scalar_text(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return v.dump();
    if (v.is_number()) return format_number(v.get<double>());
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_array()) {
        std::vector<std::string> parts;
        for (const auto& e : v) parts.push_back(json_scalar_text(e));
        return join(parts, ',');
    }
    return {};
}

std::int64_t parse_int(const std::string& field, const std::string& text, std::vector<Violation>& vs) {
    auto t = trim(text);
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
        vs.push_back({ErrorCode::MalformedValue, field, "'" + text + "' is not an integer"});
        return 0;
    }
    if (v < 0) vs.push_back({ErrorCode::OutOfRange, field, "negative"});
    return v;
}

double parse_real(const std::string& field, const std::string& text, double lo, double hi,
                  std::vector<Violation>& vs) {
    auto t = trim(text);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size() || !std::isfinite(v)) {
        vs.push_back({ErrorCode::MalformedValue, field, "'" + text + "' is not a number"});
        return 0.0;
    }
    if (v < lo || v > hi) vs.push_back({ErrorCode::OutOfRange, field, format_number(v)});
    return v;
}

std::string describe_all(const std::vector<Violation>& vs) {
    std::string out;
    for (const auto& v : vs) {
        if (!out.empty()) out += "; ";
        out += describe(v);
    }
    return out;
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::UnreadableSource, path.string());
    return in;
}

// Reads and checks the header row; returns false on an empty stream.
void expect_header(std::istream& in, const std::vector<std::string>& header, const std::string& what) {
    std::string line;
    std::vector<std::string> fields;
    if (!std::getline(in, line) || !csv::parse_line(line, fields)) {
        throw Error(ErrorCode::BadHeader, what, "missing header row");
    }
    for (auto& f : fields) f = trim(f);
    if (!fields.empty() && fields[0].rfind("\xEF\xBB\xBF", 0) == 0) fields[0].erase(0, 3);
    if (fields != header) throw Error(ErrorCode::BadHeader, what, "expected " + join(header, ','));
}

template <typename RowFn>
void for_each_row(std::istream& in, std::size_t width, std::vector<LineError>& errors, RowFn&& fn) {
    std::string line;
    std::vector<std::string> fields;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            errors.push_back({line_no, "empty line"});
            continue;
        }
        if (!csv::parse_line(line, fields)) {
            errors.push_back({line_no, "unterminated quote"});
            continue;
        }
        if (fields.size() != width) {
            errors.push_back({line_no, "expected " + std::to_string(width) + " fields, got " +
                                           std::to_string(fields.size())});
            continue;
        }
        try {
            fn(fields, line_no);
        } catch (const Error& e) {
            errors.push_back({line_no, e.what()});
        }
    }
}

} // namespace

Warning parse_warning_record(const std::string& line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        throw ValidationError({{ErrorCode::MalformedValue, "record", "not a JSON object"}});
    }
    if (!j.is_object()) throw ValidationError({{ErrorCode::MalformedValue, "record", "not a JSON object"}});

    RawRecord raw;
    for (auto it = j.begin(); it != j.end(); ++it) raw[it.key()] = json_scalar_text(it.value());

    std::vector<Violation> vs;
    Warning w;
    try {
        w.event = validate_quake_event(raw);
    } catch (const ValidationError& e) {
        vs = e.violations();
    }
    auto issued = raw.find("issued_at");
    if (issued == raw.end() || trim(issued->second).empty()) {
        vs.push_back({ErrorCode::MissingField, "issued_at", {}});
    } else if (auto ts = parse_timestamp(trim(issued->second))) {
        w.issued_at = *ts;
    } else {
        vs.push_back({ErrorCode::MalformedTimestamp, "issued_at", "'" + issued->second + "'"});
    }
    if (!vs.empty()) throw ValidationError(std::move(vs));

    auto source = raw.find("source");
    w.source = source != raw.end() && !source->second.empty() ? source->second : "BMG-like feed";
    if (auto note = raw.find("risk_note"); note != raw.end()) w.risk_note = note->second;
    return w;
}

ParseResult<Warning> parse_warning_feed(std::istream& in) {
    if (!in) throw Error(ErrorCode::UnreadableSource, "warning feed");
    ParseResult<Warning> out;
    std::set<std::string> ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            out.errors.push_back({line_no, "empty line"});
            continue;
        }
        try {
            auto w = parse_warning_record(line);
            if (!ids.insert(w.id()).second) {
                out.errors.push_back({line_no, "DuplicateWarning(" + w.id() + ")"});
                continue;
            }
            out.records.push_back(std::move(w));
        } catch (const ValidationError& e) {
            out.errors.push_back({line_no, describe_all(e.violations())});
        } catch (const Error& e) {
            out.errors.push_back({line_no, e.what()});
        }
    }
    if (in.bad()) throw Error(ErrorCode::UnreadableSource, "warning feed", "read failure");
    return out;
}

EngineConfig load_config(const std::filesystem::path& path) {
    auto in = open_or_throw(path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedValue, path.string(), e.what());
    }
    EngineConfig config;
    try {
        config = j.get<EngineConfig>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedValue, path.string(), e.what());
    }
    validate_config(config);
    return config;
}

ReferenceDataset load_reference_data(const std::filesystem::path& province_path,
                                     const std::filesystem::path& regency_path,
                                     const std::filesystem::path& config_path,
                                     std::vector<LineError>* diagnostics) {
    std::vector<LineError> errors;
    std::vector<Region> provinces, regencies;

    {
        auto in = open_or_throw(province_path);
        expect_header(in, kProvinceHeader, province_path.filename().string());
        for_each_row(in, kProvinceHeader.size(), errors, [&](const std::vector<std::string>& f, std::size_t) {
            std::vector<Violation> vs;
            Region r;
            r.kind = RegionKind::Province;
            r.code = trim(f[0]);
            r.name = trim(f[1]);
            if (r.code.empty()) vs.push_back({ErrorCode::MissingField, "code", {}});
            r.centroid_lat = parse_real("centroid_lat", f[2], -90.0, 90.0, vs);
            r.centroid_lon = parse_real("centroid_lon", f[3], -180.0, 180.0, vs);
            if (!vs.empty()) throw ValidationError(std::move(vs));
            provinces.push_back(std::move(r));
        });
    }
    {
        auto in = open_or_throw(regency_path);
        expect_header(in, kRegencyHeader, regency_path.filename().string());
        for_each_row(in, kRegencyHeader.size(), errors, [&](const std::vector<std::string>& f, std::size_t) {
            std::vector<Violation> vs;
            Region r;
            r.kind = RegionKind::Regency;
            r.code = trim(f[0]);
            r.parent_code = trim(f[1]);
            r.name = trim(f[2]);
            if (r.code.empty()) vs.push_back({ErrorCode::MissingField, "code", {}});
            r.population = parse_int("population", f[3], vs);
            r.medics_available = parse_int("medics_available", f[4], vs);
            r.medics_pledgeable = parse_int("medics_pledgeable", f[5], vs);
            r.centroid_lat = parse_real("centroid_lat", f[6], -90.0, 90.0, vs);
            r.centroid_lon = parse_real("centroid_lon", f[7], -180.0, 180.0, vs);
            if (vs.empty() && r.medics_available > r.population) {
                vs.push_back({ErrorCode::OutOfRange, "medics_available", "exceeds population"});
            }
            if (vs.empty() && r.medics_pledgeable > r.medics_available) {
                vs.push_back({ErrorCode::OutOfRange, "medics_pledgeable", "exceeds medics_available"});
            }
            if (!vs.empty()) throw ValidationError(std::move(vs));
            regencies.push_back(std::move(r));
        });
    }
    auto config = load_config(config_path);
    if (diagnostics) *diagnostics = std::move(errors);
    return ReferenceDataset(std::move(provinces), std::move(regencies), std::move(config));
}

ParseResult<HistoricalQuake> parse_historical_catalog(std::istream& in) {
    if (!in) throw Error(ErrorCode::UnreadableSource, "historical catalog");
    ParseResult<HistoricalQuake> out;
    expect_header(in, kCatalogHeader, "historical_quakes.csv");
    std::set<std::string> ids;
    for_each_row(in, kCatalogHeader.size(), out.errors, [&](const std::vector<std::string>& f, std::size_t) {
        RawRecord raw{{"id", f[0]},       {"date", f[1]},      {"time", f[2]},
                      {"latitude", f[3]}, {"longitude", f[4]}, {"magnitude", f[5]}};
        std::vector<Violation> vs;
        HistoricalQuake h;
        try {
            h.event = validate_quake_event(raw);
        } catch (const ValidationError& e) {
            vs = e.violations();
        }
        h.region_label = trim(f[6]);
        for (const auto& code : split(h.region_label, ';')) {
            if (auto c = trim(code); !c.empty()) h.event.affected_regencies.push_back(c);
        }
        h.event.epicenter_desc = h.region_label;
        h.deaths = parse_int("deaths", f[7], vs);
        h.injured = parse_int("injured", f[8], vs);
        h.buildings_destroyed = parse_int("buildings_destroyed", f[9], vs);
        h.exposed_population = parse_int("exposed_population", f[10], vs);
        if (vs.empty() && h.exposed_population < 1) {
            vs.push_back({ErrorCode::OutOfRange, "exposed_population", "must be positive"});
        }
        if (vs.empty() && h.deaths + h.injured > h.exposed_population) {
            vs.push_back({ErrorCode::OutOfRange, "deaths", "deaths + injured exceed exposed_population"});
        }
        if (!vs.empty()) throw ValidationError(std::move(vs));
        if (!ids.insert(h.event.id).second) throw Error(ErrorCode::DuplicateCode, h.event.id);
        out.records.push_back(std::move(h));
    });
    return out;
}

ParseResult<HistoricalQuake> load_historical_catalog(const std::filesystem::path& path) {
    auto in = open_or_throw(path);
    return parse_historical_catalog(in);
}

void write_provinces(std::ostream& out, const std::vector<Region>& provinces) {
    csv::write_row(out, kProvinceHeader);
    for (const auto& p : provinces) {
        csv::write_row(out, {p.code, p.name, format_number(p.centroid_lat), format_number(p.centroid_lon)});
    }
}

void write_regencies(std::ostream& out, const std::vector<Region>& regencies) {
    csv::write_row(out, kRegencyHeader);
    for (const auto& r : regencies) {
        csv::write_row(out, {r.code, r.parent_code, r.name, std::to_string(r.population),
                             std::to_string(r.medics_available), std::to_string(r.medics_pledgeable),
                             format_number(r.centroid_lat), format_number(r.centroid_lon)});
    }
}

void write_catalog(std::ostream& out, const std::vector<HistoricalQuake>& catalog) {
    csv::write_row(out, kCatalogHeader);
    for (const auto& h : catalog) {
        const auto& e = h.event;
        csv::write_row(out, {e.id, format_date(e.date), format_time_of_day(e.time), format_number(e.latitude),
                             format_number(e.longitude), format_number(e.magnitude), h.region_label,
                             std::to_string(h.deaths), std::to_string(h.injured),
                             std::to_string(h.buildings_destroyed), std::to_string(h.exposed_population)});
    }
}

void write_config(std::ostream& out, const EngineConfig& config) {
    out << json(config).dump(2) << '\n';
}

void save_reference_data(const ReferenceDataset& ref, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::ofstream p(dir / "provinces.csv");
    write_provinces(p, ref.provinces());
    std::ofstream r(dir / "regencies.csv");
    write_regencies(r, ref.regencies());
    std::ofstream c(dir / "config.json");
    write_config(c, ref.config());
    if (!p || !r || !c) throw Error(ErrorCode::UnreadableSource, dir.string(), "write failed");
}

std::string to_feed_line(const Warning& w) {
    const auto& e = w.event;
    json j{{"id", e.id},
           {"issued_at", format_timestamp(w.issued_at)},
           {"date", format_date(e.date)},
           {"time", format_time_of_day(e.time)},
           {"latitude", e.latitude},
           {"longitude", e.longitude},
           {"magnitude", e.magnitude},
           {"depth_km", e.depth_km},
           {"epicenter_desc", e.epicenter_desc},
           {"affected_regencies", join(e.affected_regencies, ',')},
           {"risk_note", w.risk_note},
           {"source", w.source}};
    return j.dump();
}

} // namespace quakedss::ingest
