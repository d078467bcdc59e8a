#include "quakedss/json_io.hpp"

#include "quakedss/error.hpp"

#include <cstdio>

namespace quakedss {

json timestamp_json(Timestamp ts) { return format_timestamp(ts); }

Timestamp timestamp_from(const json& j) {
    auto text = j.get<std::string>();
    auto ts = parse_timestamp(text);
    if (!ts) throw Error(ErrorCode::MalformedTimestamp, text);
    return *ts;
}

namespace {

Date date_from(const json& j) {
    auto text = j.get<std::string>();
    auto d = parse_date(text);
    if (!d) throw Error(ErrorCode::MalformedTimestamp, text);
    return *d;
}

TimeOfDay time_from(const json& j) {
    auto text = j.get<std::string>();
    auto t = parse_time_of_day(text);
    if (!t) throw Error(ErrorCode::MalformedTimestamp, text);
    return *t;
}

} // namespace

void to_json(json& j, const QuakeEvent& e) {
    j = json{{"id", e.id},
             {"date", format_date(e.date)},
             {"time", format_time_of_day(e.time)},
             {"latitude", e.latitude},
             {"longitude", e.longitude},
             {"magnitude", e.magnitude},
             {"epicenter_desc", e.epicenter_desc},
             {"depth_km", e.depth_km},
             {"affected_regencies", e.affected_regencies}};
}

void from_json(const json& j, QuakeEvent& e) {
    e.id = j.at("id").get<std::string>();
    e.date = date_from(j.at("date"));
    e.time = time_from(j.at("time"));
    e.latitude = j.at("latitude").get<double>();
    e.longitude = j.at("longitude").get<double>();
    e.magnitude = j.at("magnitude").get<double>();
    e.epicenter_desc = j.value("epicenter_desc", std::string{});
    e.depth_km = j.value("depth_km", 0.0);
    e.affected_regencies = j.value("affected_regencies", std::vector<std::string>{});
}

void to_json(json& j, const Warning& w) {
    j = json{{"event", w.event},
             {"issued_at", timestamp_json(w.issued_at)},
             {"source", w.source},
             {"risk_note", w.risk_note}};
}

void from_json(const json& j, Warning& w) {
    w.event = j.at("event").get<QuakeEvent>();
    w.issued_at = timestamp_from(j.at("issued_at"));
    w.source = j.value("source", std::string{});
    w.risk_note = j.value("risk_note", std::string{});
}

void to_json(json& j, const Region& r) {
    j = json{{"code", r.code},
             {"name", r.name},
             {"kind", r.kind == RegionKind::Province ? "province" : "regency"},
             {"parent_code", r.parent_code},
             {"population", r.population},
             {"medics_available", r.medics_available},
             {"medics_pledgeable", r.medics_pledgeable},
             {"centroid_lat", r.centroid_lat},
             {"centroid_lon", r.centroid_lon}};
}

void from_json(const json& j, Region& r) {
    r.code = j.at("code").get<std::string>();
    r.name = j.value("name", std::string{});
    r.kind = j.value("kind", std::string("regency")) == "province" ? RegionKind::Province : RegionKind::Regency;
    r.parent_code = j.value("parent_code", std::string{});
    r.population = j.value("population", std::int64_t{0});
    r.medics_available = j.value("medics_available", std::int64_t{0});
    r.medics_pledgeable = j.value("medics_pledgeable", std::int64_t{0});
    r.centroid_lat = j.value("centroid_lat", 0.0);
    r.centroid_lon = j.value("centroid_lon", 0.0);
}

void to_json(json& j, const HistoricalQuake& h) {
    j = json{{"event", h.event},
             {"region_label", h.region_label},
             {"deaths", h.deaths},
             {"injured", h.injured},
             {"buildings_destroyed", h.buildings_destroyed},
             {"exposed_population", h.exposed_population}};
}

void from_json(const json& j, HistoricalQuake& h) {
    h.event = j.at("event").get<QuakeEvent>();
    h.region_label = j.value("region_label", std::string{});
    h.deaths = j.at("deaths").get<std::int64_t>();
    h.injured = j.at("injured").get<std::int64_t>();
    h.buildings_destroyed = j.at("buildings_destroyed").get<std::int64_t>();
    h.exposed_population = j.at("exposed_population").get<std::int64_t>();
}

void to_json(json& j, const MagnitudeBand& b) {
    j = json{{"label", b.label}, {"lower", b.lower}};
    j["upper"] = b.upper ? json(*b.upper) : json(nullptr);
}

void from_json(const json& j, MagnitudeBand& b) {
    b.label = j.at("label").get<std::string>();
    b.lower = j.at("lower").get<double>();
    if (j.contains("upper") && !j.at("upper").is_null()) b.upper = j.at("upper").get<double>();
    else b.upper.reset();
}

void to_json(json& j, const CustomLineItem& c) {
    j = json{{"name", c.name}, {"unit", c.unit}, {"per_person", c.per_person}};
}

void from_json(const json& j, CustomLineItem& c) {
    c.name = j.at("name").get<std::string>();
    c.unit = j.value("unit", std::string{});
    c.per_person = j.at("per_person").get<double>();
}

#define QUAKEDSS_COEFFICIENTS(X)            \
    X(rice_kg_per_person_day)               \
    X(ration_days)                          \
    X(blankets_per_person)                  \
    X(persons_per_tent)                     \
    X(persons_per_shelter_site)             \
    X(persons_per_sanitation_unit)          \
    X(persons_per_kitchen)                  \
    X(persons_per_volunteer_national)       \
    X(persons_per_volunteer_international)  \
    X(infant_fraction)                      \
    X(baby_food_kg_per_infant_day)          \
    X(cost_per_affected_person)             \
    X(persons_per_building)                 \
    X(cost_per_building)                    \
    X(building_damage_rate_per_band)        \
    X(custom_items)

void to_json(json& j, const ResourceCoefficients& c) {
    j = json::object();
#define X(name) j[#name] = c.name;
    QUAKEDSS_COEFFICIENTS(X)
#undef X
}

void from_json(const json& j, ResourceCoefficients& c) {
    // Absent keys keep their defaults; unknown keys are rejected.
    ResourceCoefficients d;
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
#define X(name) known = known || it.key() == #name;
        QUAKEDSS_COEFFICIENTS(X)
#undef X
        if (!known) throw Error(ErrorCode::InvalidCoefficient, it.key(), "unknown coefficient");
    }
#define X(name) d.name = j.value(#name, d.name);
    QUAKEDSS_COEFFICIENTS(X)
#undef X
    c = std::move(d);
}

#undef QUAKEDSS_COEFFICIENTS

void to_json(json& j, const EngineConfig& c) {
    j = json{{"sn", c.sn},
             {"analog_k", c.analog_k},
             {"magnitude_bands", c.magnitude_bands},
             {"coefficients", c.coefficients},
             {"affected_radius_km", c.affected_radius_km},
             {"sos_sla_minutes", c.sos_sla_minutes}};
}

void from_json(const json& j, EngineConfig& c) {
    EngineConfig d;
    d.sn = j.value("sn", d.sn);
    d.analog_k = j.value("analog_k", d.analog_k);
    if (j.contains("magnitude_bands")) d.magnitude_bands = j.at("magnitude_bands").get<std::vector<MagnitudeBand>>();
    if (j.contains("coefficients")) d.coefficients = j.at("coefficients").get<ResourceCoefficients>();
    d.affected_radius_km = j.value("affected_radius_km", d.affected_radius_km);
    d.sos_sla_minutes = j.value("sos_sla_minutes", d.sos_sla_minutes);
    c = std::move(d);
}

void to_json(json& j, const EstimationInputs& v) {
    j = json{{"W", v.affected_population}, {"Sn", v.standard}, {"Jtk", v.medics_available}};
}

void from_json(const json& j, EstimationInputs& v) {
    v.affected_population = j.at("W").get<std::int64_t>();
    v.standard = j.at("Sn").get<std::int64_t>();
    v.medics_available = j.at("Jtk").get<std::int64_t>();
}

void to_json(json& j, const MedicAssessment& v) { j = json{{"Tk", v.required}, {"Ktk", v.shortage}}; }

void from_json(const json& j, MedicAssessment& v) {
    v.required = j.at("Tk").get<std::int64_t>();
    v.shortage = j.at("Ktk").get<std::int64_t>();
}

void to_json(json& j, const AffectedArea& v) {
    j = json{{"population", v.population},
             {"medics_available", v.medics_available},
             {"regencies", v.regencies},
             {"low_confidence", v.low_confidence}};
}

void from_json(const json& j, AffectedArea& v) {
    v.population = j.at("population").get<std::int64_t>();
    v.medics_available = j.at("medics_available").get<std::int64_t>();
    v.regencies = j.at("regencies").get<std::vector<std::string>>();
    v.low_confidence = j.value("low_confidence", false);
}

void to_json(json& j, const AnalogWeight& v) {
    j = json{{"quake_id", v.quake_id}, {"weight", v.weight}, {"distance", v.distance}};
}

void from_json(const json& j, AnalogWeight& v) {
    v.quake_id = j.at("quake_id").get<std::string>();
    v.weight = j.at("weight").get<double>();
    v.distance = j.at("distance").get<double>();
}

void to_json(json& j, const CasualtyPrediction& v) {
    j = json{{"predicted_deaths", v.predicted_deaths},
             {"predicted_injured", v.predicted_injured},
             {"death_rate", v.death_rate},
             {"injury_rate", v.injury_rate},
             {"analogs_used", v.analogs_used}};
}

void from_json(const json& j, CasualtyPrediction& v) {
    v.predicted_deaths = j.at("predicted_deaths").get<std::int64_t>();
    v.predicted_injured = j.at("predicted_injured").get<std::int64_t>();
    v.death_rate = j.at("death_rate").get<double>();
    v.injury_rate = j.at("injury_rate").get<double>();
    v.analogs_used = j.at("analogs_used").get<std::vector<AnalogWeight>>();
}

void to_json(json& j, const CustomLineQuantity& v) {
    j = json{{"name", v.name}, {"unit", v.unit}, {"quantity", v.quantity}};
}

void from_json(const json& j, CustomLineQuantity& v) {
    v.name = j.at("name").get<std::string>();
    v.unit = j.value("unit", std::string{});
    v.quantity = j.at("quantity").get<double>();
}

#define QUAKEDSS_CHECKLIST(X)     \
    X(medics_required)            \
    X(medics_available)           \
    X(medics_shortage)            \
    X(medics_international)       \
    X(predicted_deaths)           \
    X(predicted_injured)          \
    X(volunteers_national)        \
    X(volunteers_international)   \
    X(tents)                      \
    X(shelter_sites)              \
    X(sanitation_units)           \
    X(kitchens)                   \
    X(rice_kg)                    \
    X(baby_food_kg)               \
    X(blankets)                   \
    X(total_cost)                 \
    X(buildings_at_risk)          \
    X(damage_cost)                \
    X(custom)

void to_json(json& j, const ResourceChecklist& v) {
    j = json::object();
#define X(name) j[#name] = v.name;
    QUAKEDSS_CHECKLIST(X)
#undef X
}

void from_json(const json& j, ResourceChecklist& v) {
#define X(name) j.at(#name).get_to(v.name);
    QUAKEDSS_CHECKLIST(X)
#undef X
}

#undef QUAKEDSS_CHECKLIST

void to_json(json& j, const Assessment& v) {
    j = json{{"warning_id", v.warning_id},
             {"magnitude_band", v.magnitude_band},
             {"inputs", v.inputs},
             {"area", v.area},
             {"medics", v.medics},
             {"casualties", v.casualties},
             {"checklist", v.checklist}};
}

void from_json(const json& j, Assessment& v) {
    v.warning_id = j.at("warning_id").get<std::string>();
    v.magnitude_band = j.at("magnitude_band").get<std::string>();
    v.inputs = j.at("inputs").get<EstimationInputs>();
    v.area = j.at("area").get<AffectedArea>();
    v.medics = j.at("medics").get<MedicAssessment>();
    v.casualties = j.at("casualties").get<CasualtyPrediction>();
    v.checklist = j.at("checklist").get<ResourceChecklist>();
}

std::uint64_t content_hash(const json& j) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : j.dump()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

} // namespace quakedss

namespace quakedss::warehouse {

void to_json(json& j, const FactRow& r) {
    j = json{{"quake_id", r.quake_id},
             {"date", format_date(r.date)},
             {"regency_code", r.regency_code},
             {"magnitude_band", r.magnitude_band},
             {"deaths", r.deaths},
             {"injured", r.injured},
             {"buildings_destroyed", r.buildings_destroyed},
             {"event_count", r.event_count}};
}

void from_json(const json& j, FactRow& r) {
    r.quake_id = j.at("quake_id").get<std::string>();
    r.date = date_from(j.at("date"));
    r.regency_code = j.at("regency_code").get<std::string>();
    r.magnitude_band = j.at("magnitude_band").get<std::string>();
    r.deaths = j.at("deaths").get<std::int64_t>();
    r.injured = j.at("injured").get<std::int64_t>();
    r.buildings_destroyed = j.at("buildings_destroyed").get<std::int64_t>();
    r.event_count = j.value("event_count", std::int64_t{1});
}

void to_json(json& j, const SourceRow& r) {
    j = json{{"fact", r.fact}, {"modified_at", timestamp_json(r.modified_at)}};
}

void from_json(const json& j, SourceRow& r) {
    r.fact = j.at("fact").get<FactRow>();
    r.modified_at = timestamp_from(j.at("modified_at"));
}

void to_json(json& j, const ExtractionBatch& b) {
    j = json{{"source_id", b.source_id}, {"rows", b.rows}, {"max_timestamp", timestamp_json(b.max_timestamp)}};
}

void from_json(const json& j, ExtractionBatch& b) {
    b.source_id = j.at("source_id").get<std::string>();
    b.rows = j.at("rows").get<std::vector<SourceRow>>();
    b.max_timestamp = timestamp_from(j.at("max_timestamp"));
}

void to_json(json& j, const Measures& m) {
    j = json{{"deaths", m.deaths},
             {"injured", m.injured},
             {"buildings_destroyed", m.buildings_destroyed},
             {"event_count", m.event_count}};
}

void to_json(json& j, const FactStore& s) {
    json facts = json::array();
    for (const auto& [key, row] : s.facts()) facts.push_back(row);
    json marks = json::object();
    for (const auto& [source, ts] : s.watermarks()) marks[source] = timestamp_json(ts);
    j = json{{"facts", std::move(facts)}, {"watermarks", std::move(marks)}};
}

} // namespace quakedss::warehouse

namespace quakedss::escalation {

void to_json(json& j, const Pledge& p) {
    j = json{{"source_region_code", p.source_region_code},
             {"medics_pledged", p.medics_pledged},
             {"recorded_at", timestamp_json(p.recorded_at)}};
}

void from_json(const json& j, Pledge& p) {
    p.source_region_code = j.at("source_region_code").get<std::string>();
    p.medics_pledged = j.at("medics_pledged").get<std::int64_t>();
    p.recorded_at = timestamp_from(j.at("recorded_at"));
}

void to_json(json& j, const SourceCandidate& c) {
    j = json{{"code", c.code},
             {"name", c.name},
             {"medics_pledgeable", c.medics_pledgeable},
             {"distance_km", c.distance_km}};
}

void from_json(const json& j, SourceCandidate& c) {
    c.code = j.at("code").get<std::string>();
    c.name = j.value("name", std::string{});
    c.medics_pledgeable = j.at("medics_pledgeable").get<std::int64_t>();
    c.distance_km = j.at("distance_km").get<double>();
}

void to_json(json& j, const Event& e) {
    j = json{{"kind", std::string(event_kind(e))}};
    std::visit(
        [&](const auto& ev) {
            using T = std::decay_t<decltype(ev)>;
            if constexpr (std::is_same_v<T, AssessedEvent>) {
                j["shortage"] = ev.shortage;
                j["at"] = timestamp_json(ev.at);
            } else if constexpr (std::is_same_v<T, Sos1Event>) {
                j["approver"] = ev.approver;
                j["amount"] = ev.amount;
                j["sources"] = ev.sources;
                j["at"] = timestamp_json(ev.at);
            } else if constexpr (std::is_same_v<T, PledgeEvent>) {
                j["pledge"] = ev.pledge;
            } else if constexpr (std::is_same_v<T, Sos2Event>) {
                j["approver"] = ev.approver;
                j["amount"] = ev.amount;
                j["at"] = timestamp_json(ev.at);
            } else if constexpr (std::is_same_v<T, ResolvedEvent>) {
                j["approver"] = ev.approver;
                j["at"] = timestamp_json(ev.at);
            }
        },
        e);
}

void from_json(const json& j, Event& e) {
    auto kind = j.at("kind").get<std::string>();
    if (kind == "assessed") {
        e = AssessedEvent{j.at("shortage").get<std::int64_t>(), timestamp_from(j.at("at"))};
    } else if (kind == "sos1") {
        e = Sos1Event{j.at("approver").get<std::string>(), j.at("amount").get<std::int64_t>(),
                      j.at("sources").get<std::vector<SourceCandidate>>(), timestamp_from(j.at("at"))};
    } else if (kind == "pledge") {
        e = PledgeEvent{j.at("pledge").get<Pledge>()};
    } else if (kind == "sos2") {
        e = Sos2Event{j.at("approver").get<std::string>(), j.at("amount").get<std::int64_t>(),
                      timestamp_from(j.at("at"))};
    } else if (kind == "resolved") {
        e = ResolvedEvent{j.at("approver").get<std::string>(), timestamp_from(j.at("at"))};
    } else {
        throw Error(ErrorCode::MalformedValue, "kind", kind);
    }
}

void to_json(json& j, const Approval& a) {
    j = json{{"action", a.action}, {"approver", a.approver}, {"at", timestamp_json(a.at)}};
}

void to_json(json& j, const EscalationState& s) {
    j = json{{"warning_id", s.warning_id},
             {"phase", std::string(to_string(s.phase))},
             {"initial_shortage", s.initial_shortage},
             {"shortage", s.shortage},
             {"pledges", s.pledges},
             {"approvals", s.approvals},
             {"history", s.history}};
    j["assessed_at"] = s.assessed_at ? timestamp_json(*s.assessed_at) : json(nullptr);
    j["sos1_amount"] = s.sos1 ? json(s.sos1->amount) : json(nullptr);
    j["sos2_amount"] = s.sos2 ? json(s.sos2->amount) : json(nullptr);
    j["sources"] = s.sos1 ? json(s.sos1->sources) : json::array();
}

void to_json(json& j, const SosRequest& r) {
    j = json{{"warning_id", r.warning_id},
             {"stage", r.stage},
             {"amount", r.amount},
             {"sources", r.sources},
             {"issued_at", timestamp_json(r.issued_at)}};
}

} // namespace quakedss::escalation
