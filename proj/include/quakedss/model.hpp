#pragma once

#include "quakedss/time.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace quakedss {

using RegionCode = std::string;

struct QuakeEvent {
    std::string id;
    Date date;
    TimeOfDay time{0};
    double latitude = 0.0;   // degrees, [-90, 90]
    double longitude = 0.0;  // degrees, [-180, 180]
    double magnitude = 0.0;  // Richter, [0, 10]
    std::string epicenter_desc;
    double depth_km = 0.0;
    std::vector<RegionCode> affected_regencies;

    Timestamp occurred_at() const { return combine(date, time); }

    bool operator==(const QuakeEvent&) const = default;
};

// Early-warning prediction wrapping the predicted event.
struct Warning {
    QuakeEvent event;
    Timestamp issued_at;
    std::string source;
    std::string risk_note;

    const std::string& id() const { return event.id; }

    bool operator==(const Warning&) const = default;
};

enum class RegionKind { Province, Regency };

struct Region {
    RegionCode code;
    std::string name;
    RegionKind kind = RegionKind::Regency;
    RegionCode parent_code;          // empty for provinces
    std::int64_t population = 0;
    std::int64_t medics_available = 0;
    std::int64_t medics_pledgeable = 0;
    double centroid_lat = 0.0;
    double centroid_lon = 0.0;

    bool operator==(const Region&) const = default;
};

struct HistoricalQuake {
    QuakeEvent event;
    std::string region_label;  // ';'-separated regency codes when it maps onto reference data
    std::int64_t deaths = 0;
    std::int64_t injured = 0;
    std::int64_t buildings_destroyed = 0;
    std::int64_t exposed_population = 1;

    double death_rate() const { return static_cast<double>(deaths) / static_cast<double>(exposed_population); }
    double injury_rate() const { return static_cast<double>(injured) / static_cast<double>(exposed_population); }

    bool operator==(const HistoricalQuake&) const = default;
};

// Lower-inclusive, upper-exclusive; the last band has no upper bound.
struct MagnitudeBand {
    std::string label;
    double lower = 0.0;
    std::optional<double> upper;

    bool contains(double m) const { return m >= lower && (!upper || m < *upper); }

    bool operator==(const MagnitudeBand&) const = default;
};

// Integer Richter edges: [0,5) [5,6) [6,7) [7,8) [8,inf).
std::vector<MagnitudeBand> default_magnitude_bands();

// Throws ValidationError unless the bands partition [0, inf) in ascending order.
void validate_bands(const std::vector<MagnitudeBand>& bands);

// Requires m >= 0 and a partition; returns the unique containing band.
const MagnitudeBand& magnitude_band(double m, const std::vector<MagnitudeBand>& bands);

// Unvalidated event as it arrives from a feed or form: every field is text.
using RawRecord = std::map<std::string, std::string>;

// Collects every field violation before throwing ValidationError.
QuakeEvent validate_quake_event(const RawRecord& raw);

// Inverse of validate_quake_event for an already-valid event.
RawRecord to_raw(const QuakeEvent& event);

// Shortest text that parses back to the same double.
std::string format_number(double v);

std::vector<std::string> split(const std::string& text, char sep);
std::string join(const std::vector<std::string>& parts, char sep);
std::string trim(std::string_view text);

} // namespace quakedss
