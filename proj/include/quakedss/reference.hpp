#pragma once

#include "quakedss/model.hpp"

#include <chrono>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace quakedss {

// Coefficient-driven extra checklist line: quantity = W * per_person.
struct CustomLineItem {
    std::string name;
    std::string unit;
    double per_person = 0.0;

    bool operator==(const CustomLineItem&) const = default;
};

/**
 * ResourceCoefficients - per-capita operating parameters for the resource
 * checklist. A persons_per_* value of 0 disables that line (quantity 0).
 */
struct ResourceCoefficients {
    double rice_kg_per_person_day = 0.4;
    std::int64_t ration_days = 7;
    double blankets_per_person = 1.0;
    double persons_per_tent = 5.0;
    double persons_per_shelter_site = 500.0;
    double persons_per_sanitation_unit = 20.0;
    double persons_per_kitchen = 200.0;
    double persons_per_volunteer_national = 50.0;
    double persons_per_volunteer_international = 0.0;
    double infant_fraction = 0.02;
    double baby_food_kg_per_infant_day = 0.2;
    double cost_per_affected_person = 100.0;     // abstract monetary units
    double persons_per_building = 4.0;           // population proxy for building stock
    double cost_per_building = 25000.0;          // abstract monetary units
    std::map<std::string, double> building_damage_rate_per_band; // band label -> fraction
    std::vector<CustomLineItem> custom_items;

    bool operator==(const ResourceCoefficients&) const = default;
};

// Throws ValidationError listing every invalid coefficient.
void validate_coefficients(const ResourceCoefficients& c);

// Everything carried by the config file.
struct EngineConfig {
    std::int64_t sn = 500;      // max persons handled per medic during a disaster
    std::int64_t analog_k = 3;
    std::vector<MagnitudeBand> magnitude_bands = default_magnitude_bands();
    ResourceCoefficients coefficients;
    // Fallback affected-area radius per band, for warnings without a regency list.
    std::map<std::string, double> affected_radius_km;
    std::int64_t sos_sla_minutes = 60;

    bool operator==(const EngineConfig&) const = default;
};

void validate_config(const EngineConfig& config);

/**
 * ReferenceDataset - cross-validated province/regency hierarchy plus the
 * engine configuration. Immutable once constructed.
 */
class ReferenceDataset {
public:
    ReferenceDataset() = default;
    // Throws Error(DuplicateCode) / Error(OrphanRegency) / ValidationError.
    ReferenceDataset(std::vector<Region> provinces, std::vector<Region> regencies, EngineConfig config);

    const std::vector<Region>& provinces() const { return provinces_; }
    const std::vector<Region>& regencies() const { return regencies_; }
    const EngineConfig& config() const { return config_; }
    std::int64_t sn() const { return config_.sn; }
    const ResourceCoefficients& coefficients() const { return config_.coefficients; }

    const Region* find_regency(const RegionCode& code) const;
    const Region* find_province(const RegionCode& code) const;

    std::size_t region_count() const { return provinces_.size() + regencies_.size(); }

    bool operator==(const ReferenceDataset& o) const {
        return provinces_ == o.provinces_ && regencies_ == o.regencies_ && config_ == o.config_;
    }

private:
    std::vector<Region> provinces_;
    std::vector<Region> regencies_;
    EngineConfig config_;
    std::map<RegionCode, std::size_t> province_index_;
    std::map<RegionCode, std::size_t> regency_index_;
};

} // namespace quakedss
