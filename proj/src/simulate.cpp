#include "quakedss/simulate.hpp"

#include "quakedss/error.hpp"
#include "quakedss/event_log.hpp"
#include "quakedss/geo.hpp"
#include "quakedss/ingest.hpp"
#include "quakedss/service.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

namespace quakedss::simulate {

namespace {

// Explicit mappings from raw 64-bit draws; the standard distributions are
// implementation-defined and would make output differ across toolchains.
class Draw {
public:
    explicit Draw(std::uint64_t seed) : rng_(seed) {}

    double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
    double between(double lo, double hi) { return lo + (hi - lo) * unit(); }
    std::int64_t integer(std::int64_t lo, std::int64_t hi) {
        auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<std::int64_t>(rng_() % span);
    }

private:
    std::mt19937_64 rng_;
};

double round_to(double v, double step) { return std::round(v / step) * step; }

std::string numbered(const char* prefix, int n, int width) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%0*d", prefix, width, n);
    return buf;
}

EngineConfig simulation_config() {
    EngineConfig c;
    const auto bands = default_magnitude_bands();
    const double damage[] = {0.001, 0.01, 0.03, 0.08, 0.15};
    const double radius[] = {25.0, 50.0, 100.0, 200.0, 400.0};
    for (std::size_t i = 0; i < bands.size() && i < 5; ++i) {
        c.coefficients.building_damage_rate_per_band[bands[i].label] = damage[i];
        c.affected_radius_km[bands[i].label] = radius[i];
    }
    return c;
}

} // namespace

Scenario generate_scenario(const SimulationOptions& options) {
    if (options.regencies < 4 || options.regencies > 500) {
        throw Error(ErrorCode::OutOfRange, "regencies", "expected 4..500, got " + std::to_string(options.regencies));
    }
    if (options.magnitude && !(*options.magnitude >= 0.0 && *options.magnitude <= 10.0)) {
        throw Error(ErrorCode::OutOfRange, "magnitude", format_number(*options.magnitude));
    }
    if (options.catalog_size < 1) throw Error(ErrorCode::OutOfRange, "catalog_size");

    Draw draw(options.seed);
    const int n_prov = std::max(1, options.regencies / 4);

    std::vector<Region> provinces;
    for (int p = 1; p <= n_prov; ++p) {
        Region r;
        r.code = numbered("SP", p, 2);
        r.name = "Sim Province " + numbered("", p, 2);
        r.kind = RegionKind::Province;
        r.centroid_lat = round_to(draw.between(-8.5, 5.0), 1e-4);
        r.centroid_lon = round_to(draw.between(95.0, 140.0), 1e-4);
        provinces.push_back(std::move(r));
    }

    std::vector<Region> regencies;
    for (int i = 1; i <= options.regencies; ++i) {
        const auto& prov = provinces[static_cast<std::size_t>((i - 1) % n_prov)];
        Region r;
        r.code = numbered("SR", i, 3);
        r.name = "Sim Regency " + numbered("", i, 3);
        r.kind = RegionKind::Regency;
        r.parent_code = prov.code;
        r.population = draw.integer(200'000, 2'500'000);
        r.medics_available = draw.integer(10, 150);
        r.medics_pledgeable = draw.integer(5, std::min<std::int64_t>(40, r.medics_available));
        r.centroid_lat = round_to(std::clamp(prov.centroid_lat + draw.between(-1.0, 1.0), -90.0, 90.0), 1e-4);
        r.centroid_lon = round_to(prov.centroid_lon + draw.between(-1.0, 1.0), 1e-4);
        regencies.push_back(std::move(r));
    }

    std::vector<HistoricalQuake> catalog;
    for (int q = 1; q <= options.catalog_size; ++q) {
        const auto& home = regencies[static_cast<std::size_t>(draw.integer(0, options.regencies - 1))];
        std::vector<std::string> label{home.code};
        if (draw.unit() < 0.4) {
            const auto& other = regencies[static_cast<std::size_t>(draw.integer(0, options.regencies - 1))];
            if (other.code != home.code) label.push_back(other.code);
        }
        std::sort(label.begin(), label.end());

        HistoricalQuake h;
        h.event.id = numbered("SIM-Q", q, 3);
        h.event.date = std::chrono::year{static_cast<int>(draw.integer(1980, 2024))} /
                       std::chrono::month{static_cast<unsigned>(draw.integer(1, 12))} /
                       std::chrono::day{static_cast<unsigned>(draw.integer(1, 28))};
        h.event.time = TimeOfDay{draw.integer(0, 86'399)};
        h.event.latitude = round_to(std::clamp(home.centroid_lat + draw.between(-0.5, 0.5), -90.0, 90.0), 1e-4);
        h.event.longitude = round_to(home.centroid_lon + draw.between(-0.5, 0.5), 1e-4);
        h.event.magnitude = round_to(draw.between(5.0, 9.2), 0.1);
        h.event.epicenter_desc = "near " + home.name;
        h.region_label = join(label, ';');
        h.exposed_population = draw.integer(20'000, 2'000'000);
        double rate = std::pow(10.0, 1.2 * (h.event.magnitude - 9.0)) * draw.between(0.005, 0.05);
        h.deaths = static_cast<std::int64_t>(std::floor(rate * static_cast<double>(h.exposed_population)));
        auto injured = static_cast<std::int64_t>(std::floor(static_cast<double>(h.deaths) * draw.between(2.0, 5.0)));
        h.injured = std::min(injured, h.exposed_population - h.deaths);
        h.buildings_destroyed = static_cast<std::int64_t>(
            std::floor(static_cast<double>(h.exposed_population) / 4.0 * std::min(1.0, rate * draw.between(1.0, 4.0))));
        catalog.push_back(std::move(h));
    }

    // The warning targets the three regencies nearest a random epicenter.
    const auto& centre = regencies[static_cast<std::size_t>(draw.integer(0, options.regencies - 1))];
    double lat = round_to(std::clamp(centre.centroid_lat + draw.between(-0.3, 0.3), -90.0, 90.0), 1e-4);
    double lon = round_to(centre.centroid_lon + draw.between(-0.3, 0.3), 1e-4);
    double magnitude = options.magnitude ? *options.magnitude : round_to(draw.between(7.0, 8.8), 0.1);

    std::vector<std::pair<double, std::string>> by_distance;
    for (const auto& r : regencies) by_distance.emplace_back(geo::haversine_km(lat, lon, r.centroid_lat, r.centroid_lon), r.code);
    std::sort(by_distance.begin(), by_distance.end());

    Warning w;
    w.issued_at = Timestamp{std::chrono::sys_days{std::chrono::year{2030} / 1 / 1}};
    w.event.id = "SIM-" + std::to_string(options.seed);
    w.event.date = std::chrono::year{2030} / 1 / 1;
    w.event.time = TimeOfDay{600};
    w.event.latitude = lat;
    w.event.longitude = lon;
    w.event.magnitude = magnitude;
    w.event.epicenter_desc = "offshore near " + centre.name;
    w.event.depth_km = round_to(draw.between(5.0, 60.0), 0.1);
    for (std::size_t i = 0; i < 3; ++i) w.event.affected_regencies.push_back(by_distance[i].second);
    w.source = "simulated feed";
    w.risk_note = "synthetic scenario";

    return Scenario{ReferenceDataset(std::move(provinces), std::move(regencies), simulation_config()), std::move(catalog),
                    std::move(w)};
}

namespace {

std::string field(const json& j, const char* key) {
    const auto& v = j.at(key);
    if (v.is_number_float()) return format_number(v.get<double>());
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

} // namespace

SimulationReport run_scenario(const Scenario& scenario) {
    using namespace std::chrono_literals;
    namespace svc = quakedss::service;

    auto now = std::make_shared<Timestamp>(scenario.warning.issued_at);
    auto store = std::make_shared<svc::MemoryEventStore>();
    svc::ServiceOptions options;
    options.clock = [now] { return *now; };
    svc::Service service(scenario.reference, scenario.catalog, store, options);

    SimulationReport report;
    auto& out = report.lines;
    const auto& w = scenario.warning;
    const std::string id = w.id();

    out.push_back("scenario provinces=" + std::to_string(scenario.reference.provinces().size()) +
                  " regencies=" + std::to_string(scenario.reference.regencies().size()) +
                  " catalog=" + std::to_string(scenario.catalog.size()));
    auto loaded = service.refresh_warehouse();
    out.push_back("warehouse facts=" + std::to_string(loaded));

    *now += 1min;
    auto posted = service.post_warning(ingest::to_feed_line(w));
    const auto& a = posted.at("assessment");
    out.push_back("warning id=" + id + " magnitude=" + format_number(w.event.magnitude) +
                  " band=" + a.at("magnitude_band").get<std::string>() +
                  " affected=" + join(w.event.affected_regencies, ','));
    out.push_back("assessment W=" + field(a.at("inputs"), "W") + " Sn=" + field(a.at("inputs"), "Sn") +
                  " Jtk=" + field(a.at("inputs"), "Jtk") + " Tk=" + field(a.at("medics"), "Tk") +
                  " Ktk=" + field(a.at("medics"), "Ktk"));
    const auto& c = a.at("checklist");
    out.push_back("casualties deaths=" + field(c, "predicted_deaths") + " injured=" + field(c, "predicted_injured"));
    out.push_back("checklist tents=" + field(c, "tents") + " shelter_sites=" + field(c, "shelter_sites") +
                  " rice_kg=" + field(c, "rice_kg") + " blankets=" + field(c, "blankets") +
                  " volunteers=" + field(c, "volunteers_national") + " cost=" + field(c, "total_cost") +
                  " buildings_at_risk=" + field(c, "buildings_at_risk"));
    out.push_back("phase " + posted.at("phase").get<std::string>());

    auto state = posted.at("escalation");
    if (state.at("phase") == "Assessed") {
        *now += 5min;
        state = service.issue_sos1(id, "ops:duty-officer");
        out.push_back("sos1 amount=" + field(state, "sos1_amount") +
                      " sources=" + std::to_string(state.at("candidates").size()));

        const json candidates = state.at("candidates");
        for (const auto& cand : candidates) {
            auto shortage = state.at("shortage").get<std::int64_t>();
            if (shortage == 0) break;
            auto give = std::min(shortage, cand.at("remaining_pledgeable").get<std::int64_t>());
            if (give <= 0) continue;
            *now += 2min;
            escalation::Pledge p{cand.at("code").get<std::string>(), give, *now};
            state = service.record_pledge(id, p);
            out.push_back("pledge source=" + p.source_region_code + " medics=" + std::to_string(give) +
                          " shortage=" + field(state, "shortage"));
        }

        *now += 10min;
        state = service.evaluate_sos2(id, "ops:director");
        if (state.at("phase") == "Sos2Issued") {
            out.push_back("sos2 amount=" + field(state, "sos2_amount"));
            *now += 30min;
            escalation::Pledge p{escalation::kInternational, state.at("shortage").get<std::int64_t>(), *now};
            state = service.record_pledge(id, p);
            out.push_back("pledge source=" + p.source_region_code + " medics=" + std::to_string(p.medics_pledged) +
                          " shortage=" + field(state, "shortage"));
        }
    }
    const auto& approvals = state.at("approvals");
    std::string closer = approvals.empty() ? "-" : approvals.back().at("approver").get<std::string>();
    report.final_phase = state.at("phase").get<std::string>();
    out.push_back("final phase=" + report.final_phase + " closed_by=" + closer);

    report.state_hash = service.state_hash();
    report.log_length = service.sequence();
    out.push_back("log events=" + std::to_string(report.log_length) + " state_hash=" + hex64(report.state_hash));
    return report;
}

} // namespace quakedss::simulate
