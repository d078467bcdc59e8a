#include "quakedss/warehouse.hpp"

#include "quakedss/error.hpp"

#include <algorithm>
#include <numeric>

namespace quakedss::warehouse {

namespace {
__extension__ typedef __int128 Wide;
}

std::string_view to_string(Dimension d) {
    switch (d) {
    case Dimension::Time: return "time";
    case Dimension::Geography: return "geography";
    case Dimension::Magnitude: return "magnitude";
    }
    return "?";
}

std::string_view to_string(Level l) {
    switch (l) {
    case Level::Year: return "year";
    case Level::Month: return "month";
    case Level::Day: return "day";
    case Level::Province: return "province";
    case Level::Regency: return "regency";
    case Level::Band: return "band";
    }
    return "?";
}

Dimension parse_dimension(std::string_view text) {
    for (auto d : {Dimension::Time, Dimension::Geography, Dimension::Magnitude}) {
        if (to_string(d) == text) return d;
    }
    throw Error(ErrorCode::UnknownDimension, std::string(text));
}

const std::vector<Level>& levels_of(Dimension dim) {
    static const std::vector<Level> time{Level::Year, Level::Month, Level::Day};
    static const std::vector<Level> geography{Level::Province, Level::Regency};
    static const std::vector<Level> magnitude{Level::Band};
    switch (dim) {
    case Dimension::Time: return time;
    case Dimension::Geography: return geography;
    case Dimension::Magnitude: return magnitude;
    }
    return magnitude;
}

Level parse_level(Dimension dim, std::string_view text) {
    for (auto l : levels_of(dim)) {
        if (to_string(l) == text) return l;
    }
    throw Error(ErrorCode::UnknownLevel, std::string(text), std::string("not a level of ") + std::string(to_string(dim)));
}

Dimension dimension_of(Level level) {
    switch (level) {
    case Level::Year:
    case Level::Month:
    case Level::Day: return Dimension::Time;
    case Level::Province:
    case Level::Regency: return Dimension::Geography;
    case Level::Band: return Dimension::Magnitude;
    }
    return Dimension::Magnitude;
}

Measures measures_of(const FactRow& row) {
    return {row.deaths, row.injured, row.buildings_destroyed, row.event_count};
}

ExtractionBatch extract_deferred(std::span<const SourceRow> source, const SourceWatermark& watermark) {
    ExtractionBatch batch;
    batch.source_id = watermark.source_id;
    batch.max_timestamp = watermark.last_extracted_at;
    for (const auto& row : source) {
        if (row.modified_at > watermark.last_extracted_at) {
            batch.rows.push_back(row);
            batch.max_timestamp = std::max(batch.max_timestamp, row.modified_at);
        }
    }
    return batch;
}

std::vector<SourceRow> source_rows_from_catalog(std::span<const HistoricalQuake> catalog,
                                                const ReferenceDataset& ref,
                                                std::vector<std::string>* unresolved) {
    std::vector<SourceRow> rows;
    for (const auto& h : catalog) {
        std::vector<const Region*> regencies;
        for (const auto& code : split(h.region_label, ';')) {
            if (const Region* r = ref.find_regency(trim(code))) {
                if (std::find(regencies.begin(), regencies.end(), r) == regencies.end()) regencies.push_back(r);
            }
        }
        if (regencies.empty()) {
            if (unresolved) unresolved->push_back(h.event.id);
            continue;
        }
        std::sort(regencies.begin(), regencies.end(),
                  [](const Region* a, const Region* b) { return a->code < b->code; });

        Wide total_pop = 0;
        for (const Region* r : regencies) total_pop += r->population;
        auto weight = [&](const Region* r) -> Wide { return total_pop > 0 ? r->population : 1; };
        Wide denom = total_pop > 0 ? total_pop : static_cast<Wide>(regencies.size());

        // Largest-remainder apportionment keeps each measure's sum exact.
        auto apportion = [&](std::int64_t total) {
            std::vector<std::int64_t> shares(regencies.size());
            std::vector<std::pair<Wide, std::size_t>> remainders;
            std::int64_t assigned = 0;
            for (std::size_t i = 0; i < regencies.size(); ++i) {
                Wide num = static_cast<Wide>(total) * weight(regencies[i]);
                shares[i] = static_cast<std::int64_t>(num / denom);
                assigned += shares[i];
                remainders.emplace_back(num % denom, i);
            }
            std::stable_sort(remainders.begin(), remainders.end(),
                             [](const auto& a, const auto& b) { return a.first > b.first; });
            for (std::int64_t k = 0; k < total - assigned; ++k) ++shares[remainders[static_cast<std::size_t>(k)].second];
            return shares;
        };
        auto deaths = apportion(h.deaths);
        auto injured = apportion(h.injured);
        auto buildings = apportion(h.buildings_destroyed);
        const auto& band = magnitude_band(h.event.magnitude, ref.config().magnitude_bands).label;
        for (std::size_t i = 0; i < regencies.size(); ++i) {
            FactRow f{h.event.id, h.event.date, regencies[i]->code, band, deaths[i], injured[i], buildings[i], 1};
            rows.push_back({std::move(f), h.event.occurred_at()});
        }
    }
    return rows;
}

std::shared_ptr<const Schema> Schema::from_reference(const ReferenceDataset& ref) {
    auto schema = std::make_shared<Schema>();
    for (const auto& p : ref.provinces()) schema->provinces[p.code] = {p.name};
    for (const auto& r : ref.regencies()) schema->regencies[r.code] = {r.name, r.parent_code};
    for (const auto& b : ref.config().magnitude_bands) schema->band_labels.push_back(b.label);
    return schema;
}

bool Schema::is_member(Level level, const std::string& member) const {
    switch (level) {
    case Level::Year: {
        if (member.size() != 4) return false;
        return std::all_of(member.begin(), member.end(), [](char c) { return c >= '0' && c <= '9'; });
    }
    case Level::Month: return member.size() == 7 && parse_date(member + "-01").has_value();
    case Level::Day: return parse_date(member).has_value();
    case Level::Province: return provinces.count(member) > 0;
    case Level::Regency: return regencies.count(member) > 0;
    case Level::Band: return std::find(band_labels.begin(), band_labels.end(), member) != band_labels.end();
    }
    return false;
}

std::string member_of(const FactRow& row, Level level, const Schema& schema) {
    switch (level) {
    case Level::Year: return format_date(row.date).substr(0, 4);
    case Level::Month: return format_date(row.date).substr(0, 7);
    case Level::Day: return format_date(row.date);
    case Level::Regency: return row.regency_code;
    case Level::Province: {
        auto it = schema.regencies.find(row.regency_code);
        return it == schema.regencies.end() ? std::string{} : it->second.province_code;
    }
    case Level::Band: return row.magnitude_band;
    }
    return {};
}

std::string coarsen(const std::string& member, Level from, Level to, const Schema& schema) {
    if (from == to) return member;
    if (from == Level::Day && to == Level::Month) return member.substr(0, 7);
    if ((from == Level::Day || from == Level::Month) && to == Level::Year) return member.substr(0, 4);
    if (from == Level::Regency && to == Level::Province) {
        auto it = schema.regencies.find(member);
        if (it == schema.regencies.end()) throw Error(ErrorCode::UnknownMember, member);
        return it->second.province_code;
    }
    throw Error(ErrorCode::UnknownLevel, std::string(to_string(to)),
                "cannot coarsen from " + std::string(to_string(from)));
}

FactStore::FactStore() : schema_(std::make_shared<Schema>()) {}

FactStore::FactStore(std::shared_ptr<const Schema> schema) : schema_(std::move(schema)) {}

LoadStats FactStore::load_facts(const ExtractionBatch& batch) {
    for (const auto& row : batch.rows) {
        const auto& f = row.fact;
        if (!schema_->regencies.count(f.regency_code)) {
            throw Error(ErrorCode::ConflictingDimension, f.regency_code, "unknown regency in fact " + f.quake_id);
        }
        if (!schema_->is_member(Level::Band, f.magnitude_band)) {
            throw Error(ErrorCode::ConflictingDimension, f.magnitude_band, "unknown band in fact " + f.quake_id);
        }
        if (f.deaths < 0 || f.injured < 0 || f.buildings_destroyed < 0 || f.event_count < 0) {
            throw Error(ErrorCode::OutOfRange, f.quake_id, "negative measure");
        }
    }
    LoadStats stats;
    for (const auto& row : batch.rows) {
        auto [it, inserted] = facts_.insert_or_assign(Key{row.fact.quake_id, row.fact.regency_code}, row.fact);
        (inserted ? stats.inserted : stats.updated) += 1;
    }
    auto& wm = watermarks_[batch.source_id];
    wm = std::max(wm, batch.max_timestamp);
    return stats;
}

SourceWatermark FactStore::watermark(const std::string& source_id) const {
    auto it = watermarks_.find(source_id);
    return {source_id, it == watermarks_.end() ? Timestamp{} : it->second};
}

Measures FactStore::totals() const {
    Measures m;
    for (const auto& [key, row] : facts_) m += measures_of(row);
    return m;
}

Hypercube::Hypercube(std::vector<Axis> axes, std::map<Coordinate, Measures> cells,
                     std::vector<Restriction> restrictions, std::shared_ptr<const Schema> schema)
    : axes_(std::move(axes)), cells_(std::move(cells)), restrictions_(std::move(restrictions)),
      schema_(std::move(schema)) {}

int Hypercube::axis_index(Dimension dim) const {
    for (std::size_t i = 0; i < axes_.size(); ++i) {
        if (axes_[i].dimension == dim) return static_cast<int>(i);
    }
    return -1;
}

Measures Hypercube::totals() const {
    Measures m;
    for (const auto& [coord, cell] : cells_) m += cell;
    return m;
}

namespace {

void check_axes(const std::vector<Axis>& axes) {
    std::set<Dimension> seen;
    for (const auto& a : axes) {
        if (dimension_of(a.level) != a.dimension) {
            throw Error(ErrorCode::UnknownLevel, std::string(to_string(a.level)),
                        "not a level of " + std::string(to_string(a.dimension)));
        }
        if (!seen.insert(a.dimension).second) {
            throw Error(ErrorCode::UnknownDimension, std::string(to_string(a.dimension)), "axis repeated");
        }
    }
}

void check_members(const Schema& schema, Level level, const std::set<std::string>& members) {
    for (const auto& m : members) {
        if (!schema.is_member(level, m)) {
            throw Error(ErrorCode::UnknownMember, m, "not a " + std::string(to_string(level)));
        }
    }
}

bool passes(const FactRow& row, const std::vector<Restriction>& restrictions, const Schema& schema) {
    return std::all_of(restrictions.begin(), restrictions.end(), [&](const Restriction& r) {
        return r.members.count(member_of(row, r.level, schema)) > 0;
    });
}

int require_axis(const Hypercube& cube, Dimension dim) {
    int idx = cube.axis_index(dim);
    if (idx < 0) throw Error(ErrorCode::UnknownDimension, std::string(to_string(dim)), "not an axis of the cube");
    return idx;
}

} // namespace

Hypercube build_cube(const FactStore& store, std::vector<Axis> axes, std::vector<Restriction> filter) {
    check_axes(axes);
    const Schema& schema = *store.schema();
    for (const auto& r : filter) check_members(schema, r.level, r.members);

    std::map<Coordinate, Measures> cells;
    for (const auto& [key, row] : store.facts()) {
        if (!passes(row, filter, schema)) continue;
        Coordinate coord;
        coord.reserve(axes.size());
        for (const auto& a : axes) coord.push_back(member_of(row, a.level, schema));
        cells[coord] += measures_of(row);
    }
    return Hypercube(std::move(axes), std::move(cells), std::move(filter), store.schema());
}

Hypercube roll_up(const Hypercube& cube, Dimension dim) {
    auto idx = static_cast<std::size_t>(require_axis(cube, dim));
    const auto& levels = levels_of(dim);
    auto pos = std::find(levels.begin(), levels.end(), cube.axes()[idx].level);
    if (pos == levels.begin()) {
        throw Error(ErrorCode::AlreadyCoarsest, std::string(to_string(dim)), std::string(to_string(*pos)));
    }
    Level from = *pos;
    Level to = *std::prev(pos);

    auto axes = cube.axes();
    axes[idx].level = to;
    std::map<Coordinate, Measures> cells;
    for (const auto& [coord, m] : cube.cells()) {
        auto c = coord;
        c[idx] = coarsen(coord[idx], from, to, *cube.schema());
        cells[c] += m;
    }
    return Hypercube(std::move(axes), std::move(cells), cube.restrictions(), cube.schema());
}

Hypercube drill_down(const Hypercube& cube, Dimension dim, const FactStore& store) {
    auto idx = static_cast<std::size_t>(require_axis(cube, dim));
    const auto& levels = levels_of(dim);
    auto pos = std::find(levels.begin(), levels.end(), cube.axes()[idx].level);
    if (std::next(pos) == levels.end()) {
        throw Error(ErrorCode::AlreadyFinest, std::string(to_string(dim)), std::string(to_string(*pos)));
    }
    auto axes = cube.axes();
    axes[idx].level = *std::next(pos);
    return build_cube(store, std::move(axes), cube.restrictions());
}

Hypercube slice(const Hypercube& cube, Dimension dim, const std::string& member) {
    auto idx = static_cast<std::size_t>(require_axis(cube, dim));
    Level level = cube.axes()[idx].level;
    check_members(*cube.schema(), level, {member});

    auto axes = cube.axes();
    axes.erase(axes.begin() + static_cast<std::ptrdiff_t>(idx));
    std::map<Coordinate, Measures> cells;
    for (const auto& [coord, m] : cube.cells()) {
        if (coord[idx] != member) continue;
        auto c = coord;
        c.erase(c.begin() + static_cast<std::ptrdiff_t>(idx));
        cells[c] += m;
    }
    auto restrictions = cube.restrictions();
    restrictions.push_back({level, {member}});
    return Hypercube(std::move(axes), std::move(cells), std::move(restrictions), cube.schema());
}

Hypercube dice(const Hypercube& cube, const std::vector<std::pair<Dimension, std::set<std::string>>>& predicates) {
    std::vector<std::pair<std::size_t, const std::set<std::string>*>> checks;
    auto restrictions = cube.restrictions();
    for (const auto& [dim, members] : predicates) {
        auto idx = static_cast<std::size_t>(require_axis(cube, dim));
        Level level = cube.axes()[idx].level;
        check_members(*cube.schema(), level, members);
        checks.emplace_back(idx, &members);
        restrictions.push_back({level, members});
    }
    std::map<Coordinate, Measures> cells;
    for (const auto& [coord, m] : cube.cells()) {
        bool keep = std::all_of(checks.begin(), checks.end(),
                                [&](const auto& c) { return c.second->count(coord[c.first]) > 0; });
        if (keep) cells.emplace(coord, m);
    }
    return Hypercube(cube.axes(), std::move(cells), std::move(restrictions), cube.schema());
}

} // namespace quakedss::warehouse
