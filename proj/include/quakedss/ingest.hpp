#pragma once

#include "quakedss/model.hpp"
#include "quakedss/reference.hpp"

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

namespace quakedss::ingest {

struct LineError {
    std::size_t line = 0; // 1-based physical line number
    std::string reason;

    bool operator==(const LineError&) const = default;
};

template <typename T>
struct ParseResult {
    std::vector<T> records;
    std::vector<LineError> errors;
};

inline const std::vector<std::string> kProvinceHeader{"code", "name", "centroid_lat", "centroid_lon"};
inline const std::vector<std::string> kRegencyHeader{
    "code", "province_code", "name", "population", "medics_available", "medics_pledgeable", "centroid_lat",
    "centroid_lon"};
inline const std::vector<std::string> kCatalogHeader{
    "id", "date", "time", "latitude", "longitude", "magnitude", "region_label", "deaths", "injured",
    "buildings_destroyed", "exposed_population"};

// Line-delimited feed: one single-line JSON object per line. Bad lines are
// reported and skipped; the parse never aborts on a bad line.
ParseResult<Warning> parse_warning_feed(std::istream& in);

// One feed record (already decoded) into a validated Warning.
// Throws ValidationError.
Warning parse_warning_record(const std::string& line);

// Throws Error(UnreadableSource) when a file cannot be opened, BadHeader,
// DuplicateCode, OrphanRegency. Rows with malformed numbers are skipped and
// reported in `diagnostics` when given.
ReferenceDataset load_reference_data(const std::filesystem::path& province_path,
                                     const std::filesystem::path& regency_path,
                                     const std::filesystem::path& config_path,
                                     std::vector<LineError>* diagnostics = nullptr);

EngineConfig load_config(const std::filesystem::path& path);

ParseResult<HistoricalQuake> parse_historical_catalog(std::istream& in);
ParseResult<HistoricalQuake> load_historical_catalog(const std::filesystem::path& path);

void write_provinces(std::ostream& out, const std::vector<Region>& provinces);
void write_regencies(std::ostream& out, const std::vector<Region>& regencies);
void write_catalog(std::ostream& out, const std::vector<HistoricalQuake>& catalog);
void write_config(std::ostream& out, const EngineConfig& config);

// provinces.csv, regencies.csv and config.json under `dir`.
void save_reference_data(const ReferenceDataset& ref, const std::filesystem::path& dir);

// Serialises a warning as one feed line (no trailing newline).
std::string to_feed_line(const Warning& w);

} // namespace quakedss::ingest
