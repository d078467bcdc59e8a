#pragma once

#include "quakedss/model.hpp"
#include "quakedss/reference.hpp"
#include "quakedss/time.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace quakedss::warehouse {

enum class Dimension { Time, Geography, Magnitude };
enum class Level { Year, Month, Day, Province, Regency, Band };

std::string_view to_string(Dimension d);
std::string_view to_string(Level l);
Dimension parse_dimension(std::string_view text);             // throws UnknownDimension
Level parse_level(Dimension dim, std::string_view text);      // throws UnknownLevel
Dimension dimension_of(Level level);
// Levels ordered coarse -> fine.
const std::vector<Level>& levels_of(Dimension dim);

// Base grain is (quake, regency); event_count is 1 per base row.
struct FactRow {
    std::string quake_id;
    Date date;
    RegionCode regency_code;
    std::string magnitude_band;
    std::int64_t deaths = 0;
    std::int64_t injured = 0;
    std::int64_t buildings_destroyed = 0;
    std::int64_t event_count = 1;

    bool operator==(const FactRow&) const = default;
};

struct Measures {
    std::int64_t deaths = 0;
    std::int64_t injured = 0;
    std::int64_t buildings_destroyed = 0;
    std::int64_t event_count = 0;

    Measures& operator+=(const Measures& o) {
        deaths += o.deaths;
        injured += o.injured;
        buildings_destroyed += o.buildings_destroyed;
        event_count += o.event_count;
        return *this;
    }
    bool operator==(const Measures&) const = default;
};

Measures measures_of(const FactRow& row);

// Transactional-side row: a fact plus its last-modified time.
struct SourceRow {
    FactRow fact;
    Timestamp modified_at;

    bool operator==(const SourceRow&) const = default;
};

struct SourceWatermark {
    std::string source_id;
    Timestamp last_extracted_at{};

    bool operator==(const SourceWatermark&) const = default;
};

struct ExtractionBatch {
    std::string source_id;
    std::vector<SourceRow> rows;
    Timestamp max_timestamp{};

    bool operator==(const ExtractionBatch&) const = default;
};

// Rows modified strictly after the watermark; rows stamped exactly at the
// watermark belong to the previous batch.
ExtractionBatch extract_deferred(std::span<const SourceRow> source, const SourceWatermark& watermark);

// Splits each historical quake over the regencies named in its region_label,
// population-proportionally with largest-remainder rounding (integer sums
// conserved). Quakes whose label resolves to no regency are skipped and
// reported via `unresolved`.
std::vector<SourceRow> source_rows_from_catalog(std::span<const HistoricalQuake> catalog,
                                                const ReferenceDataset& ref,
                                                std::vector<std::string>* unresolved = nullptr);

/**
 * Schema - the snowflake dimension tables: regency -> province links and the
 * magnitude band table. Shared read-only by the store and every cube.
 */
struct Schema {
    struct Province {
        std::string name;
        bool operator==(const Province&) const = default;
    };
    struct Regency {
        std::string name;
        RegionCode province_code;
        bool operator==(const Regency&) const = default;
    };

    std::map<RegionCode, Province> provinces;
    std::map<RegionCode, Regency> regencies;
    std::vector<std::string> band_labels;

    static std::shared_ptr<const Schema> from_reference(const ReferenceDataset& ref);

    bool is_member(Level level, const std::string& member) const;
    bool operator==(const Schema&) const = default;
};

// The member a fact row maps to at a given level.
std::string member_of(const FactRow& row, Level level, const Schema& schema);

// Maps a member at `from` to its ancestor at the coarser level `to`.
std::string coarsen(const std::string& member, Level from, Level to, const Schema& schema);

struct LoadStats {
    std::size_t inserted = 0;
    std::size_t updated = 0;

    bool operator==(const LoadStats&) const = default;
};

class FactStore {
public:
    using Key = std::pair<std::string, RegionCode>; // (quake_id, regency_code)

    FactStore();
    explicit FactStore(std::shared_ptr<const Schema> schema);

    // Atomic upsert by (quake_id, regency_code), then advances the source
    // watermark to the batch maximum. Throws ConflictingDimension on an
    // unknown regency or band without touching the store.
    LoadStats load_facts(const ExtractionBatch& batch);

    const std::map<Key, FactRow>& facts() const { return facts_; }
    SourceWatermark watermark(const std::string& source_id) const;
    const std::map<std::string, Timestamp>& watermarks() const { return watermarks_; }
    const std::shared_ptr<const Schema>& schema() const { return schema_; }

    Measures totals() const;

    bool operator==(const FactStore& o) const { return facts_ == o.facts_ && watermarks_ == o.watermarks_; }

private:
    std::shared_ptr<const Schema> schema_;
    std::map<Key, FactRow> facts_;
    std::map<std::string, Timestamp> watermarks_;
};

struct Axis {
    Dimension dimension;
    Level level;

    bool operator==(const Axis&) const = default;
};

// Fact-level membership constraint accumulated by filters, slices and dices.
struct Restriction {
    Level level;
    std::set<std::string> members;

    bool operator==(const Restriction&) const = default;
};

using Coordinate = std::vector<std::string>;

/**
 * Hypercube - sparse aggregate of fact measures keyed by one member per axis.
 * Absent cells are zero. Equality compares axes and cells; restrictions are
 * provenance that lets drill_down re-derive finer cells from the store.
 */
class Hypercube {
public:
    Hypercube() = default;
    Hypercube(std::vector<Axis> axes, std::map<Coordinate, Measures> cells, std::vector<Restriction> restrictions,
              std::shared_ptr<const Schema> schema);

    const std::vector<Axis>& axes() const { return axes_; }
    const std::map<Coordinate, Measures>& cells() const { return cells_; }
    const std::vector<Restriction>& restrictions() const { return restrictions_; }
    const std::shared_ptr<const Schema>& schema() const { return schema_; }

    // Index of the axis on `dim`, or -1.
    int axis_index(Dimension dim) const;
    Measures totals() const;

    bool operator==(const Hypercube& o) const { return axes_ == o.axes_ && cells_ == o.cells_; }

private:
    std::vector<Axis> axes_;
    std::map<Coordinate, Measures> cells_;
    std::vector<Restriction> restrictions_;
    std::shared_ptr<const Schema> schema_;
};

Hypercube build_cube(const FactStore& store, std::vector<Axis> axes, std::vector<Restriction> filter = {});
Hypercube roll_up(const Hypercube& cube, Dimension dim);
Hypercube drill_down(const Hypercube& cube, Dimension dim, const FactStore& store);
Hypercube slice(const Hypercube& cube, Dimension dim, const std::string& member);
Hypercube dice(const Hypercube& cube, const std::vector<std::pair<Dimension, std::set<std::string>>>& predicates);

} // namespace quakedss::warehouse
