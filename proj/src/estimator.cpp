#include "quakedss/estimator.hpp"

#include "quakedss/error.hpp"
#include "quakedss/geo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace quakedss {

AffectedArea affected_population(const Warning& warning, const ReferenceDataset& ref) {
    AffectedArea area;
    std::vector<RegionCode> codes = warning.event.affected_regencies;
    if (codes.empty()) {
        const auto& band = magnitude_band(warning.event.magnitude, ref.config().magnitude_bands);
        auto it = ref.config().affected_radius_km.find(band.label);
        if (it != ref.config().affected_radius_km.end() && it->second > 0.0) {
            codes = regencies_within(ref, warning.event.latitude, warning.event.longitude, it->second);
            area.low_confidence = true;
        }
    }
    std::set<RegionCode> seen;
    for (const auto& code : codes) {
        const Region* r = ref.find_regency(code);
        if (r == nullptr) throw Error(ErrorCode::UnknownRegency, code);
        if (!seen.insert(code).second) continue;
        area.population += r->population;
        area.medics_available += r->medics_available;
        area.regencies.push_back(code);
    }
    return area;
}

std::vector<RegionCode> regencies_within(const ReferenceDataset& ref, double lat, double lon, double radius_km) {
    std::vector<RegionCode> out;
    for (const auto& r : ref.regencies()) {
        if (geo::haversine_km(lat, lon, r.centroid_lat, r.centroid_lon) <= radius_km) out.push_back(r.code);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::int64_t required_medics(std::int64_t affected_population, std::int64_t standard) {
    if (standard < 1) throw Error(ErrorCode::InvalidStandard, "sn", std::to_string(standard) + " < 1");
    if (affected_population < 0) throw Error(ErrorCode::OutOfRange, "W", "negative population");
    // A fractional requirement means one more whole medic.
    return affected_population / standard + (affected_population % standard != 0 ? 1 : 0);
}

std::int64_t medic_shortage(std::int64_t required, std::int64_t available) {
    return required > available ? required - available : 0;
}

MedicAssessment assess_medics(const EstimationInputs& in) {
    MedicAssessment m;
    m.required = required_medics(in.affected_population, in.standard);
    m.shortage = medic_shortage(m.required, in.medics_available);
    return m;
}

namespace {

double log_population(std::int64_t p) {
    return std::log10(static_cast<double>(std::max<std::int64_t>(p, 1)));
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v) { lo = std::min(lo, v); hi = std::max(hi, v); }
    double normalize(double v) const { return hi > lo ? (v - lo) / (hi - lo) : 0.0; }
};

} // namespace

CasualtyPrediction predict_casualties(double magnitude, std::int64_t affected_population,
                                      std::span<const HistoricalQuake> catalog, std::int64_t k) {
    if (catalog.empty()) throw Error(ErrorCode::EmptyCatalog, "catalog");
    if (k < 1) throw Error(ErrorCode::OutOfRange, "k", std::to_string(k) + " < 1");

    Range mag_range, pop_range;
    for (const auto& h : catalog) {
        mag_range.add(h.event.magnitude);
        pop_range.add(log_population(h.exposed_population));
    }
    double q_mag = mag_range.normalize(magnitude);
    double q_pop = pop_range.normalize(log_population(affected_population));

    struct Candidate {
        const HistoricalQuake* quake;
        double distance;
    };
    std::vector<Candidate> candidates;
    candidates.reserve(catalog.size());
    for (const auto& h : catalog) {
        double dm = mag_range.normalize(h.event.magnitude) - q_mag;
        double dp = pop_range.normalize(log_population(h.exposed_population)) - q_pop;
        candidates.push_back({&h, std::sqrt(dm * dm + dp * dp)});
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.distance != b.distance) return a.distance < b.distance;
        if (a.quake->event.date != b.quake->event.date) return a.quake->event.date < b.quake->event.date;
        return a.quake->event.id < b.quake->event.id;
    });
    candidates.resize(std::min<std::size_t>(candidates.size(), static_cast<std::size_t>(k)));

    double total = 0.0;
    for (const auto& c : candidates) total += 1.0 / (c.distance + kAnalogEpsilon);

    CasualtyPrediction out;
    for (const auto& c : candidates) {
        double w = (1.0 / (c.distance + kAnalogEpsilon)) / total;
        out.analogs_used.push_back({c.quake->event.id, w, c.distance});
        out.death_rate += w * c.quake->death_rate();
        out.injury_rate += w * c.quake->injury_rate();
    }
    out.death_rate = std::clamp(out.death_rate, 0.0, 1.0);
    out.injury_rate = std::clamp(out.injury_rate, 0.0, 1.0);
    double w_pop = static_cast<double>(affected_population);
    out.predicted_deaths = std::llround(out.death_rate * w_pop);
    out.predicted_injured = std::llround(out.injury_rate * w_pop);
    return out;
}

namespace {

// ceil(W / per_unit); a zero divisor disables the line.
std::int64_t units_for(std::int64_t population, double persons_per_unit) {
    if (persons_per_unit <= 0.0 || population <= 0) return 0;
    double whole = std::floor(persons_per_unit);
    if (whole == persons_per_unit && whole <= 9.0e15) {
        auto d = static_cast<std::int64_t>(whole);
        return population / d + (population % d != 0 ? 1 : 0);
    }
    return static_cast<std::int64_t>(std::ceil(static_cast<double>(population) / persons_per_unit));
}

} // namespace

ResourceChecklist resource_checklist(std::int64_t affected_population, const std::string& magnitude_band,
                                     const ResourceCoefficients& coeffs, const EstimationInputs& inputs,
                                     const MedicAssessment& medics, const CasualtyPrediction& casualties) {
    validate_coefficients(coeffs);
    const std::int64_t w = std::max<std::int64_t>(affected_population, 0);
    const double wd = static_cast<double>(w);

    ResourceChecklist c;
    c.medics_required = medics.required;
    c.medics_available = w == 0 ? 0 : inputs.medics_available;
    c.medics_shortage = medics.shortage;
    c.predicted_deaths = casualties.predicted_deaths;
    c.predicted_injured = casualties.predicted_injured;
    c.volunteers_national = units_for(w, coeffs.persons_per_volunteer_national);
    c.volunteers_international = units_for(w, coeffs.persons_per_volunteer_international);
    c.tents = units_for(w, coeffs.persons_per_tent);
    c.shelter_sites = units_for(w, coeffs.persons_per_shelter_site);
    c.sanitation_units = units_for(w, coeffs.persons_per_sanitation_unit);
    c.kitchens = units_for(w, coeffs.persons_per_kitchen);
    c.rice_kg = wd * coeffs.rice_kg_per_person_day * static_cast<double>(coeffs.ration_days);
    double infants = static_cast<double>(std::llround(wd * coeffs.infant_fraction));
    c.baby_food_kg = infants * coeffs.baby_food_kg_per_infant_day * static_cast<double>(coeffs.ration_days);
    c.blankets = static_cast<std::int64_t>(std::ceil(wd * coeffs.blankets_per_person));
    c.total_cost = wd * coeffs.cost_per_affected_person;

    auto rate = coeffs.building_damage_rate_per_band.find(magnitude_band);
    if (rate != coeffs.building_damage_rate_per_band.end() && coeffs.persons_per_building > 0.0) {
        c.buildings_at_risk = std::llround(rate->second * wd / coeffs.persons_per_building);
    }
    c.damage_cost = static_cast<double>(c.buildings_at_risk) * coeffs.cost_per_building;

    for (const auto& item : coeffs.custom_items) {
        c.custom.push_back({item.name, item.unit, wd * item.per_person});
    }
    return c;
}

Assessment assess_with(const std::string& warning_id, double magnitude, const AffectedArea& area,
                       std::int64_t standard, const EngineConfig& config,
                       std::span<const HistoricalQuake> catalog) {
    Assessment a;
    a.warning_id = warning_id;
    a.magnitude_band = magnitude_band(magnitude, config.magnitude_bands).label;
    a.area = area;
    a.inputs = {area.population, standard, area.medics_available};
    a.medics = assess_medics(a.inputs);
    a.casualties = predict_casualties(magnitude, area.population, catalog, config.analog_k);
    a.checklist = resource_checklist(area.population, a.magnitude_band, config.coefficients, a.inputs, a.medics,
                                     a.casualties);
    return a;
}

Assessment assess_warning(const Warning& warning, const ReferenceDataset& ref,
                          std::span<const HistoricalQuake> catalog) {
    auto area = affected_population(warning, ref);
    return assess_with(warning.id(), warning.event.magnitude, area, ref.sn(), ref.config(), catalog);
}

} // namespace quakedss
