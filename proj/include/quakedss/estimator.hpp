#pragma once

#include "quakedss/model.hpp"
#include "quakedss/reference.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace quakedss {

struct EstimationInputs {
    std::int64_t affected_population = 0; // W
    std::int64_t standard = 1;            // Sn, persons per medic
    std::int64_t medics_available = 0;    // Jtk

    bool operator==(const EstimationInputs&) const = default;
};

struct MedicAssessment {
    std::int64_t required = 0; // Tk
    std::int64_t shortage = 0; // Ktk

    bool operator==(const MedicAssessment&) const = default;
};

struct AffectedArea {
    std::int64_t population = 0;       // W
    std::int64_t medics_available = 0; // Jtk
    std::vector<RegionCode> regencies;
    bool low_confidence = false;       // derived from the radius fallback

    bool operator==(const AffectedArea&) const = default;
};

struct AnalogWeight {
    std::string quake_id;
    double weight = 0.0;
    double distance = 0.0;

    bool operator==(const AnalogWeight&) const = default;
};

struct CasualtyPrediction {
    std::int64_t predicted_deaths = 0;
    std::int64_t predicted_injured = 0;
    double death_rate = 0.0;
    double injury_rate = 0.0;
    std::vector<AnalogWeight> analogs_used;

    bool operator==(const CasualtyPrediction&) const = default;
};

struct CustomLineQuantity {
    std::string name;
    std::string unit;
    double quantity = 0.0;

    bool operator==(const CustomLineQuantity&) const = default;
};

/**
 * ResourceChecklist - one quantified line per response question: medics,
 * volunteers, shelter, food, blankets, cost and damage.
 */
struct ResourceChecklist {
    std::int64_t medics_required = 0;      // Tk
    std::int64_t medics_available = 0;     // Jtk
    std::int64_t medics_shortage = 0;      // Ktk, the national request
    std::int64_t medics_international = 0; // filled from the escalation's SOS-2 request
    std::int64_t predicted_deaths = 0;
    std::int64_t predicted_injured = 0;
    std::int64_t volunteers_national = 0;
    std::int64_t volunteers_international = 0;
    std::int64_t tents = 0;
    std::int64_t shelter_sites = 0;
    std::int64_t sanitation_units = 0;
    std::int64_t kitchens = 0;
    double rice_kg = 0.0;
    double baby_food_kg = 0.0;
    std::int64_t blankets = 0;
    double total_cost = 0.0;
    std::int64_t buildings_at_risk = 0;
    double damage_cost = 0.0;
    std::vector<CustomLineQuantity> custom;

    bool operator==(const ResourceChecklist&) const = default;
};

struct Assessment {
    std::string warning_id;
    std::string magnitude_band;
    EstimationInputs inputs;
    AffectedArea area;
    MedicAssessment medics;
    CasualtyPrediction casualties;
    ResourceChecklist checklist;

    bool operator==(const Assessment&) const = default;
};

// W and Jtk over the warning's regency list, or the radius fallback when
// the list is empty and a radius is configured for the warning's band.
AffectedArea affected_population(const Warning& warning, const ReferenceDataset& ref);

// Regencies whose centroid lies within radius_km of the epicenter.
std::vector<RegionCode> regencies_within(const ReferenceDataset& ref, double lat, double lon, double radius_km);

// Tk = ceil(W / Sn). Throws InvalidStandard when Sn < 1.
std::int64_t required_medics(std::int64_t affected_population, std::int64_t standard);

// Ktk = Tk - Jtk when Tk > Jtk, else 0.
std::int64_t medic_shortage(std::int64_t required, std::int64_t available);

MedicAssessment assess_medics(const EstimationInputs& in);

inline constexpr double kAnalogEpsilon = 1e-6;

// k nearest analogs in min-max normalised (magnitude, log10 exposed
// population) space, inverse-distance weighted. Throws EmptyCatalog.
CasualtyPrediction predict_casualties(double magnitude, std::int64_t affected_population,
                                      std::span<const HistoricalQuake> catalog, std::int64_t k);

ResourceChecklist resource_checklist(std::int64_t affected_population, const std::string& magnitude_band,
                                     const ResourceCoefficients& coeffs, const EstimationInputs& inputs,
                                     const MedicAssessment& medics, const CasualtyPrediction& casualties);

// Full composition: area, medic counts, casualty analogs, checklist.
Assessment assess_warning(const Warning& warning, const ReferenceDataset& ref,
                          std::span<const HistoricalQuake> catalog);

// Same pipeline with explicit inputs, used by what-if recomputation.
Assessment assess_with(const std::string& warning_id, double magnitude, const AffectedArea& area,
                       std::int64_t standard, const EngineConfig& config,
                       std::span<const HistoricalQuake> catalog);

} // namespace quakedss
