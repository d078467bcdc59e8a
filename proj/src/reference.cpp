#include "quakedss/reference.hpp"

#include "quakedss/error.hpp"

namespace quakedss {

void validate_coefficients(const ResourceCoefficients& c) {
    std::vector<Violation> vs;
    auto non_negative = [&](const char* name, double v) {
        if (!(v >= 0.0)) vs.push_back({ErrorCode::InvalidCoefficient, name, format_number(v) + " < 0"});
    };
    non_negative("rice_kg_per_person_day", c.rice_kg_per_person_day);
    non_negative("ration_days", static_cast<double>(c.ration_days));
    non_negative("blankets_per_person", c.blankets_per_person);
    non_negative("persons_per_tent", c.persons_per_tent);
    non_negative("persons_per_shelter_site", c.persons_per_shelter_site);
    non_negative("persons_per_sanitation_unit", c.persons_per_sanitation_unit);
    non_negative("persons_per_kitchen", c.persons_per_kitchen);
    non_negative("persons_per_volunteer_national", c.persons_per_volunteer_national);
    non_negative("persons_per_volunteer_international", c.persons_per_volunteer_international);
    non_negative("baby_food_kg_per_infant_day", c.baby_food_kg_per_infant_day);
    non_negative("cost_per_affected_person", c.cost_per_affected_person);
    non_negative("persons_per_building", c.persons_per_building);
    non_negative("cost_per_building", c.cost_per_building);
    if (!(c.infant_fraction >= 0.0 && c.infant_fraction <= 1.0)) {
        vs.push_back({ErrorCode::InvalidCoefficient, "infant_fraction", format_number(c.infant_fraction) + " not in [0, 1]"});
    }
    for (const auto& [band, rate] : c.building_damage_rate_per_band) {
        if (!(rate >= 0.0 && rate <= 1.0)) {
            vs.push_back({ErrorCode::InvalidCoefficient, "building_damage_rate_per_band." + band,
                          format_number(rate) + " not in [0, 1]"});
        }
    }
    for (const auto& item : c.custom_items) {
        if (item.name.empty()) vs.push_back({ErrorCode::InvalidCoefficient, "custom_items", "empty name"});
        non_negative(("custom_items." + item.name).c_str(), item.per_person);
    }
    if (!vs.empty()) throw ValidationError(std::move(vs));
}

void validate_config(const EngineConfig& config) {
    if (config.sn < 1) throw Error(ErrorCode::InvalidStandard, "sn", std::to_string(config.sn) + " < 1");
    if (config.analog_k < 1) throw Error(ErrorCode::OutOfRange, "analog_k", std::to_string(config.analog_k) + " < 1");
    if (config.sos_sla_minutes < 0) throw Error(ErrorCode::OutOfRange, "sos_sla_minutes");
    validate_bands(config.magnitude_bands);
    validate_coefficients(config.coefficients);
    for (const auto& [band, km] : config.affected_radius_km) {
        if (!(km >= 0.0)) throw Error(ErrorCode::OutOfRange, "affected_radius_km." + band);
    }
}

namespace {

void check_region(const Region& r, std::vector<Violation>& vs) {
    auto field = [&](const char* name) { return r.code + "." + name; };
    if (r.code.empty()) vs.push_back({ErrorCode::MissingField, "code", r.name});
    if (r.population < 0) vs.push_back({ErrorCode::OutOfRange, field("population"), "negative"});
    if (r.medics_available < 0 || r.medics_available > r.population) {
        vs.push_back({ErrorCode::OutOfRange, field("medics_available"), "must lie in [0, population]"});
    }
    if (r.medics_pledgeable < 0 || r.medics_pledgeable > r.medics_available) {
        vs.push_back({ErrorCode::OutOfRange, field("medics_pledgeable"), "must lie in [0, medics_available]"});
    }
    if (!(r.centroid_lat >= -90.0 && r.centroid_lat <= 90.0)) {
        vs.push_back({ErrorCode::OutOfRange, field("centroid_lat"), format_number(r.centroid_lat)});
    }
    if (!(r.centroid_lon >= -180.0 && r.centroid_lon <= 180.0)) {
        vs.push_back({ErrorCode::OutOfRange, field("centroid_lon"), format_number(r.centroid_lon)});
    }
}

} // namespace

ReferenceDataset::ReferenceDataset(std::vector<Region> provinces, std::vector<Region> regencies, EngineConfig config)
    : provinces_(std::move(provinces)), regencies_(std::move(regencies)), config_(std::move(config)) {
    validate_config(config_);

    std::vector<Violation> vs;
    for (std::size_t i = 0; i < provinces_.size(); ++i) {
        auto& p = provinces_[i];
        p.kind = RegionKind::Province;
        p.parent_code.clear();
        check_region(p, vs);
        if (!province_index_.emplace(p.code, i).second) throw Error(ErrorCode::DuplicateCode, p.code);
    }
    for (std::size_t i = 0; i < regencies_.size(); ++i) {
        auto& r = regencies_[i];
        r.kind = RegionKind::Regency;
        check_region(r, vs);
        if (province_index_.count(r.code) || !regency_index_.emplace(r.code, i).second) {
            throw Error(ErrorCode::DuplicateCode, r.code);
        }
        if (!province_index_.count(r.parent_code)) throw Error(ErrorCode::OrphanRegency, r.parent_code, "regency " + r.code);
    }
    if (!vs.empty()) throw ValidationError(std::move(vs));
}

const Region* ReferenceDataset::find_regency(const RegionCode& code) const {
    auto it = regency_index_.find(code);
    return it == regency_index_.end() ? nullptr : &regencies_[it->second];
}

const Region* ReferenceDataset::find_province(const RegionCode& code) const {
    auto it = province_index_.find(code);
    return it == province_index_.end() ? nullptr : &provinces_[it->second];
}

} // namespace quakedss
