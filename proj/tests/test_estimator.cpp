#include <doctest.h>

#include "oracles.hpp"
#include "quakedss/estimator.hpp"

#include <random>

using namespace quakedss;
using testing::error_code_of;

namespace {

Warning warning_for(std::vector<RegionCode> regencies, double magnitude = 7.0) {
    Warning w;
    w.event.id = "W";
    w.event.date = std::chrono::year{2030} / 1 / 1;
    w.event.latitude = -7.9;
    w.event.longitude = 110.3;
    w.event.magnitude = magnitude;
    w.event.affected_regencies = std::move(regencies);
    return w;
}

ReferenceDataset sum_reference(std::int64_t scale = 1) {
    std::vector<Region> provinces{{"P", "P", RegionKind::Province, "", 0, 0, 0, 0, 0}};
    std::vector<Region> regencies{
        {"A", "A", RegionKind::Regency, "P", 60000 * scale, 30, 5, -7.9, 110.3},
        {"B", "B", RegionKind::Regency, "P", 40000 * scale, 20, 5, -7.8, 110.4},
        {"C", "C", RegionKind::Regency, "P", 25000 * scale, 10, 5, -6.0, 106.0},
    };
    return ReferenceDataset(provinces, regencies, EngineConfig{});
}

ResourceChecklist checklist_for(std::int64_t w, const ResourceCoefficients& c = {}) {
    EstimationInputs in{w, 500, 0};
    return resource_checklist(w, "7.0–7.9", c, in, assess_medics(in), CasualtyPrediction{});
}

} // namespace

TEST_CASE("affected population sums the listed regencies") {
    auto ref = sum_reference();
    auto area = affected_population(warning_for({"A", "B"}), ref);
    CHECK(area.population == 100000);
    CHECK(area.medics_available == 50);
    CHECK_FALSE(area.low_confidence);

    auto empty = affected_population(warning_for({}), ref);
    CHECK(empty.population == 0);
    CHECK(empty.medics_available == 0);

    try {
        affected_population(warning_for({"A", "ZZ"}), ref);
        FAIL("expected UnknownRegency");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnknownRegency);
        CHECK(e.subject() == "ZZ");
    }
    CHECK(affected_population(warning_for({"A", "A"}), ref).population == 60000);
}

TEST_CASE("doubling populations doubles W") {
    auto one = affected_population(warning_for({"A", "B", "C"}), sum_reference(1));
    auto two = affected_population(warning_for({"A", "B", "C"}), sum_reference(2));
    CHECK(two.population == 2 * one.population);
}

TEST_CASE("radius fallback is flagged low confidence") {
    std::vector<Region> provinces{{"P", "P", RegionKind::Province, "", 0, 0, 0, 0, 0}};
    std::vector<Region> regencies{
        {"NEAR", "n", RegionKind::Regency, "P", 1000, 1, 0, -7.9, 110.3},
        {"FAR", "f", RegionKind::Regency, "P", 1000, 1, 0, 10.0, 120.0},
    };
    EngineConfig cfg;
    cfg.affected_radius_km["7.0–7.9"] = 100.0;
    ReferenceDataset ref(provinces, regencies, cfg);
    auto area = affected_population(warning_for({}), ref);
    CHECK(area.low_confidence);
    CHECK(area.regencies == std::vector<RegionCode>{"NEAR"});
    CHECK(area.population == 1000);
}

TEST_CASE("required medics examples") {
    CHECK(required_medics(100000, 500) == 200);
    CHECK(required_medics(0, 500) == 0);
    CHECK(required_medics(0, 1) == 0);
    CHECK(required_medics(999, 100) == 10);
    CHECK(error_code_of([] { required_medics(10, 0); }) == ErrorCode::InvalidStandard);
}

TEST_CASE("medic shortage examples") {
    CHECK(medic_shortage(200, 50) == 150);
    CHECK(medic_shortage(50, 200) == 0);
    CHECK(medic_shortage(75, 75) == 0);
}

TEST_CASE("medic formulas against the oracle") {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 10000; ++i) {
        std::int64_t w = static_cast<std::int64_t>(rng() % 50'000'000);
        std::int64_t sn = 1 + static_cast<std::int64_t>(rng() % 5000);
        std::int64_t jtk = static_cast<std::int64_t>(rng() % 200'000);
        auto tk = required_medics(w, sn);
        REQUIRE(tk == testing::medics_oracle(w, sn));
        if (w > 0) CHECK(((tk - 1) * sn < w && w <= tk * sn));
        auto ktk = medic_shortage(tk, jtk);
        CHECK(ktk == std::max<std::int64_t>(0, tk - jtk));
        CHECK((ktk == 0) == (jtk >= tk));
    }
}

TEST_CASE("single analog forces the rate") {
    std::vector<HistoricalQuake> cat{testing::quake("ONLY", 2000, 7.0, 2000, 100000)};
    auto p = predict_casualties(6.0, 50000, cat, 3);
    CHECK(p.predicted_deaths == 1000);
    CHECK(p.death_rate == doctest::Approx(0.02));
    REQUIRE(p.analogs_used.size() == 1);
    CHECK(p.analogs_used[0].weight == doctest::Approx(1.0));
}

TEST_CASE("empty catalog") {
    std::vector<HistoricalQuake> none;
    CHECK(error_code_of([&] { predict_casualties(6.0, 1000, none, 3); }) == ErrorCode::EmptyCatalog);
}

TEST_CASE("nearest analog at magnitude 9.0 on the seed catalog is Aceh") {
    auto seed = testing::load_seed();
    for (std::int64_t w : {1'500'000LL, 2'000'000LL, 3'000'000LL}) {
        auto p = predict_casualties(9.0, w, seed.catalog, 1);
        REQUIRE(p.analogs_used.size() == 1);
        CHECK(p.analogs_used[0].quake_id == testing::analog_ranking(9.0, w, seed.catalog).front());
        CHECK(p.analogs_used[0].quake_id == "ACEH-2004");
    }
}

TEST_CASE("analog selection and weights against the oracle") {
    std::mt19937_64 rng(99);
    for (int round = 0; round < 300; ++round) {
        std::vector<HistoricalQuake> cat;
        std::size_t n = 1 + rng() % 12;
        for (std::size_t i = 0; i < n; ++i) {
            auto exposed = 1000 + static_cast<std::int64_t>(rng() % 5'000'000);
            auto deaths = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(exposed / 2));
            cat.push_back(testing::quake("Q" + std::to_string(i), 1950 + static_cast<int>(rng() % 70),
                                         5.0 + static_cast<double>(rng() % 45) / 10.0, deaths, exposed));
        }
        double m = 5.0 + static_cast<double>(rng() % 45) / 10.0;
        std::int64_t w = 1 + static_cast<std::int64_t>(rng() % 3'000'000);
        std::int64_t k = 1 + static_cast<std::int64_t>(rng() % 15);
        auto p = predict_casualties(m, w, cat, k);
        auto ranking = testing::analog_ranking(m, w, cat);

        std::size_t expect = std::min<std::size_t>(static_cast<std::size_t>(k), n);
        REQUIRE(p.analogs_used.size() == expect);
        double sum = 0.0, lo = 1.0, hi = 0.0, weighted = 0.0;
        for (std::size_t i = 0; i < expect; ++i) {
            CHECK(p.analogs_used[i].quake_id == ranking[i]);
            sum += p.analogs_used[i].weight;
            for (const auto& h : cat) {
                if (h.event.id != ranking[i]) continue;
                lo = std::min(lo, h.death_rate());
                hi = std::max(hi, h.death_rate());
                weighted += p.analogs_used[i].weight * h.death_rate();
            }
        }
        CHECK(std::abs(sum - 1.0) < 1e-9);
        CHECK(p.death_rate >= lo - 1e-12);
        CHECK(p.death_rate <= hi + 1e-12);
        CHECK(p.death_rate == doctest::Approx(weighted).epsilon(1e-12));
        CHECK(p.predicted_deaths == std::llround(p.death_rate * static_cast<double>(w)));
    }
}

TEST_CASE("checklist examples") {
    auto c = checklist_for(10000);
    CHECK(c.rice_kg == doctest::Approx(28000));
    CHECK(c.blankets == 10000);
    CHECK(c.tents == 2000);
    CHECK(checklist_for(10001).tents == 2001);
    CHECK(c.shelter_sites == 20);
    CHECK(c.sanitation_units == 500);
    CHECK(c.kitchens == 50);
    CHECK(c.volunteers_national == 200);
    CHECK(c.baby_food_kg == doctest::Approx(200 * 0.2 * 7));
    CHECK(c.total_cost == doctest::Approx(1'000'000));
}

TEST_CASE("zero population zeroes the checklist") {
    ResourceCoefficients coeffs;
    coeffs.building_damage_rate_per_band["7.0–7.9"] = 0.1;
    coeffs.custom_items.push_back({"water", "litre", 15.0});
    auto c = checklist_for(0, coeffs);
    CHECK(c.medics_required == 0);
    CHECK(c.tents == 0);
    CHECK(c.shelter_sites == 0);
    CHECK(c.sanitation_units == 0);
    CHECK(c.kitchens == 0);
    CHECK(c.rice_kg == 0.0);
    CHECK(c.baby_food_kg == 0.0);
    CHECK(c.blankets == 0);
    CHECK(c.volunteers_national == 0);
    CHECK(c.total_cost == 0.0);
    CHECK(c.buildings_at_risk == 0);
    CHECK(c.damage_cost == 0.0);
    REQUIRE(c.custom.size() == 1);
    CHECK(c.custom[0].quantity == 0.0);
}

TEST_CASE("checklist is monotone in W") {
    ResourceCoefficients coeffs;
    coeffs.building_damage_rate_per_band["7.0–7.9"] = 0.08;
    coeffs.persons_per_volunteer_international = 300;
    coeffs.custom_items.push_back({"water", "litre", 15.0});
    std::mt19937_64 rng(5);
    std::int64_t w = 0;
    auto prev = checklist_for(0, coeffs);
    for (int i = 0; i < 2000; ++i) {
        w += static_cast<std::int64_t>(rng() % 5000);
        auto c = checklist_for(w, coeffs);
        CHECK(c.medics_required >= prev.medics_required);
        CHECK(c.tents >= prev.tents);
        CHECK(c.shelter_sites >= prev.shelter_sites);
        CHECK(c.sanitation_units >= prev.sanitation_units);
        CHECK(c.kitchens >= prev.kitchens);
        CHECK(c.rice_kg >= prev.rice_kg);
        CHECK(c.baby_food_kg >= prev.baby_food_kg);
        CHECK(c.blankets >= prev.blankets);
        CHECK(c.volunteers_national >= prev.volunteers_national);
        CHECK(c.volunteers_international >= prev.volunteers_international);
        CHECK(c.total_cost >= prev.total_cost);
        CHECK(c.buildings_at_risk >= prev.buildings_at_risk);
        CHECK(c.damage_cost >= prev.damage_cost);
        CHECK(c.custom[0].quantity >= prev.custom[0].quantity);
        prev = c;
    }
}

TEST_CASE("coefficient validation") {
    ResourceCoefficients c;
    c.infant_fraction = 1.5;
    CHECK_THROWS_AS(validate_coefficients(c), ValidationError);
    c = {};
    c.rice_kg_per_person_day = -1;
    CHECK_THROWS_AS(validate_coefficients(c), ValidationError);
    c = {};
    c.building_damage_rate_per_band["8.0+"] = 2.0;
    CHECK_THROWS_AS(validate_coefficients(c), ValidationError);
}

TEST_CASE("worked assessment") {
    auto ref = testing::worked_example_reference();
    std::vector<HistoricalQuake> cat{testing::quake("H", 2006, 6.0, 500, 100000)};
    auto a = assess_warning(warning_for({"R-AFF"}), ref, cat);
    CHECK(a.inputs.affected_population == 100000);
    CHECK(a.inputs.standard == 500);
    CHECK(a.inputs.medics_available == 50);
    CHECK(a.medics.required == 200);
    CHECK(a.medics.shortage == 150);
    CHECK(a.checklist.medics_required == 200);
    CHECK(a.checklist.medics_shortage == 150);
    CHECK(a.checklist.predicted_deaths == 500);
    CHECK(a.magnitude_band == "7.0–7.9");
}
