#include "quakedss/model.hpp"

#include "quakedss/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace quakedss {

std::vector<MagnitudeBand> default_magnitude_bands() {
    return {
        {"0.0–4.9", 0.0, 5.0},
        {"5.0–5.9", 5.0, 6.0},
        {"6.0–6.9", 6.0, 7.0},
        {"7.0–7.9", 7.0, 8.0},
        {"8.0+", 8.0, std::nullopt},
    };
}

void validate_bands(const std::vector<MagnitudeBand>& bands) {
    std::vector<Violation> vs;
    if (bands.empty()) {
        vs.push_back({ErrorCode::MissingField, "magnitude_bands", "no bands configured"});
        throw ValidationError(std::move(vs));
    }
    if (bands.front().lower != 0.0) {
        vs.push_back({ErrorCode::OutOfRange, "magnitude_bands", "first band must start at 0"});
    }
    for (std::size_t i = 0; i < bands.size(); ++i) {
        const auto& b = bands[i];
        if (b.label.empty()) vs.push_back({ErrorCode::MissingField, "magnitude_bands", "empty label"});
        bool last = i + 1 == bands.size();
        if (last && b.upper) {
            vs.push_back({ErrorCode::OutOfRange, "magnitude_bands", "last band must be unbounded"});
        }
        if (!last) {
            if (!b.upper || *b.upper <= b.lower) {
                vs.push_back({ErrorCode::OutOfRange, "magnitude_bands", "band '" + b.label + "' is empty"});
            } else if (bands[i + 1].lower != *b.upper) {
                vs.push_back({ErrorCode::OutOfRange, "magnitude_bands", "gap or overlap after '" + b.label + "'"});
            }
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (bands[j].label == b.label) {
                vs.push_back({ErrorCode::DuplicateCode, "magnitude_bands", "duplicate label '" + b.label + "'"});
            }
        }
    }
    if (!vs.empty()) throw ValidationError(std::move(vs));
}

const MagnitudeBand& magnitude_band(double m, const std::vector<MagnitudeBand>& bands) {
    if (!(m >= 0.0)) throw Error(ErrorCode::OutOfRange, "magnitude", format_number(m));
    // Partition: the last band whose lower edge is <= m.
    auto it = std::upper_bound(bands.begin(), bands.end(), m,
                               [](double v, const MagnitudeBand& b) { return v < b.lower; });
    if (it == bands.begin()) throw Error(ErrorCode::OutOfRange, "magnitude", format_number(m));
    return *std::prev(it);
}

namespace {

std::optional<double> parse_double(const std::string& text) {
    auto t = trim(text);
    if (t.empty()) return std::nullopt;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

const std::string* find_field(const RawRecord& raw, const std::string& name) {
    auto it = raw.find(name);
    return it == raw.end() ? nullptr : &it->second;
}

} // namespace

QuakeEvent validate_quake_event(const RawRecord& raw) {
    std::vector<Violation> vs;
    QuakeEvent ev;

    auto required = [&](const std::string& name) -> const std::string* {
        const auto* v = find_field(raw, name);
        if (v == nullptr || trim(*v).empty()) {
            vs.push_back({ErrorCode::MissingField, name, {}});
            return nullptr;
        }
        return v;
    };
    auto number = [&](const std::string& name, double lo, double hi, double& out, bool is_required) {
        const std::string* v = is_required ? required(name) : find_field(raw, name);
        if (v == nullptr || (!is_required && trim(*v).empty())) return;
        auto parsed = parse_double(*v);
        if (!parsed) {
            vs.push_back({ErrorCode::MalformedValue, name, "'" + *v + "' is not a number"});
        } else if (*parsed < lo || *parsed > hi) {
            vs.push_back({ErrorCode::OutOfRange, name,
                          format_number(*parsed) + " not in [" + format_number(lo) + ", " + format_number(hi) + "]"});
        } else {
            out = *parsed;
        }
    };

    if (const auto* id = required("id")) ev.id = trim(*id);
    if (const auto* d = required("date")) {
        if (auto date = parse_date(trim(*d))) ev.date = *date;
        else vs.push_back({ErrorCode::MalformedTimestamp, "date", "'" + *d + "'"});
    }
    if (const auto* t = required("time")) {
        if (auto tod = parse_time_of_day(trim(*t))) ev.time = *tod;
        else vs.push_back({ErrorCode::MalformedTimestamp, "time", "'" + *t + "'"});
    }
    number("latitude", -90.0, 90.0, ev.latitude, true);
    number("longitude", -180.0, 180.0, ev.longitude, true);
    number("magnitude", 0.0, 10.0, ev.magnitude, true);
    number("depth_km", 0.0, 1.0e4, ev.depth_km, false);

    if (const auto* e = find_field(raw, "epicenter_desc")) ev.epicenter_desc = *e;
    if (const auto* a = find_field(raw, "affected_regencies")) {
        for (auto& code : split(*a, ',')) {
            auto c = trim(code);
            if (!c.empty()) ev.affected_regencies.push_back(c);
        }
    }

    if (!vs.empty()) throw ValidationError(std::move(vs));
    return ev;
}

RawRecord to_raw(const QuakeEvent& event) {
    return {
        {"id", event.id},
        {"date", format_date(event.date)},
        {"time", format_time_of_day(event.time)},
        {"latitude", format_number(event.latitude)},
        {"longitude", format_number(event.longitude)},
        {"magnitude", format_number(event.magnitude)},
        {"depth_km", format_number(event.depth_km)},
        {"epicenter_desc", event.epicenter_desc},
        {"affected_regencies", join(event.affected_regencies, ',')},
    };
}

std::string format_number(double v) {
    // Shortest round-trip digits, never in exponent form.
    char buf[400];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
    return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    if (text.empty()) return parts;
    std::size_t start = 0;
    while (true) {
        auto pos = text.find(sep, start);
        parts.push_back(text.substr(start, pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return parts;
}

std::string join(const std::vector<std::string>& parts, char sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::string trim(std::string_view text) {
    auto b = text.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = text.find_last_not_of(" \t\r\n");
    return std::string(text.substr(b, e - b + 1));
}

} // namespace quakedss
