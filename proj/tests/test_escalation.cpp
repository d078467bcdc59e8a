#include <doctest.h>

#include "oracles.hpp"

#include <cmath>
#include <random>

using namespace quakedss;
using namespace quakedss::escalation;
using testing::error_code_of;

namespace {

Timestamp t0() { return Timestamp{std::chrono::sys_days{std::chrono::year{2030} / 1 / 1}}; }

Warning warning_on(const std::vector<RegionCode>& regencies, double magnitude = 6.5) {
    Warning w;
    w.event.id = "W-1";
    w.event.date = std::chrono::year{2030} / 1 / 1;
    w.event.latitude = -7.9;
    w.event.longitude = 110.3;
    w.event.magnitude = magnitude;
    w.event.affected_regencies = regencies;
    w.issued_at = t0();
    return w;
}

std::vector<HistoricalQuake> small_catalog() {
    return {testing::quake("A", 2001, 6.0, 100, 100000), testing::quake("B", 2002, 7.0, 1000, 500000),
            testing::quake("C", 2003, 8.0, 5000, 1000000)};
}

double km(double lat1, double lon1, double lat2, double lon2) {
    const double r = 6371.0088, rad = 3.14159265358979323846 / 180.0;
    double dlat = (lat2 - lat1) * rad, dlon = (lon2 - lon1) * rad;
    double a = std::pow(std::sin(dlat / 2), 2) + std::cos(lat1 * rad) * std::cos(lat2 * rad) * std::pow(std::sin(dlon / 2), 2);
    return 2 * r * std::asin(std::sqrt(a));
}

} // namespace

TEST_CASE("worked example through SOS-2") {
    auto ref = testing::worked_example_reference();
    auto cat = small_catalog();
    auto out = assess(warning_on({"R-AFF"}), ref, cat, t0());
    CHECK(out.assessment.area.population == 100000);
    CHECK(out.assessment.medics.required == 200);
    CHECK(out.assessment.medics.shortage == 150);
    CHECK(out.state.phase == Phase::Assessed);
    CHECK(out.state.shortage == 150);
    CHECK(sos1_pending(out.state));

    auto sources = nearest_sources(std::vector<RegionCode>{"R-AFF"}, ref);
    REQUIRE(sources.size() == 2);
    CHECK(sources[0].code == "R-NEAR");
    auto s = issue_sos1(out.state, "duty-officer", sources, t0() + std::chrono::minutes(5));
    CHECK(s.phase == Phase::Sos1Issued);
    REQUIRE(s.sos1);
    CHECK(s.sos1->amount == 150);
    auto req1 = sos_request_for(s, s.history.back());
    REQUIRE(req1);
    CHECK(req1->stage == 1);
    CHECK(req1->sources == sources);

    s = record_pledge(s, {"R-NEAR", 100, t0() + std::chrono::minutes(20)}, ref);
    CHECK(s.shortage == 50);
    s = evaluate_sos2(s, "duty-officer", t0() + std::chrono::minutes(60));
    CHECK(s.phase == Phase::Sos2Issued);
    REQUIRE(s.sos2);
    CHECK(s.sos2->amount == 50);
    auto req2 = sos_request_for(s, s.history.back());
    REQUIRE(req2);
    CHECK(req2->stage == 2);
    CHECK(req2->amount == 50);
    CHECK(req2->sources.empty());

    s = record_pledge(s, {kInternational, 80, t0() + std::chrono::minutes(90)}, ref);
    CHECK(s.shortage == 0);
    s = resolve(s, "duty-officer", t0() + std::chrono::minutes(91));
    CHECK(s.phase == Phase::Resolved);
    CHECK(s.approvals.size() == 3);
    CHECK(replay(s.warning_id, s.history) == s);
}

TEST_CASE("enough local medics resolves without any SOS") {
    std::vector<Region> provinces{{"P1", "One", RegionKind::Province, "", 0, 0, 0, 0, 0}};
    std::vector<Region> regencies{{"R", "Rich", RegionKind::Regency, "P1", 100000, 250, 0, -7.9, 110.3}};
    ReferenceDataset ref(provinces, regencies, EngineConfig{});
    auto cat = small_catalog();
    for (auto& h : cat) h.region_label = "R";
    auto out = assess(warning_on({"R"}), ref, cat, t0());
    CHECK(out.assessment.medics.required == 200);
    CHECK(out.assessment.medics.shortage == 0);
    CHECK_FALSE(sos1_pending(out.state));
    CHECK(error_code_of([&] { issue_sos1(out.state, "x", {}, t0()); }) == ErrorCode::NotEligible);
    auto done = resolve(out.state, "x", t0());
    CHECK(done.phase == Phase::Resolved);
    CHECK_FALSE(done.sos1);
    CHECK_FALSE(done.sos2);
}

TEST_CASE("pledges covering the shortage skip SOS-2") {
    auto ref = testing::worked_example_reference();
    EscalationState s;
    s.warning_id = "W";
    s = apply_event(s, AssessedEvent{150, t0()});
    s = issue_sos1(s, "a", {}, t0());
    s = record_pledge(s, {"R-NEAR", 100, t0()}, ref);
    s = record_pledge(s, {"R-FAR", 60, t0()}, ref);
    CHECK(s.shortage == 0);
    s = evaluate_sos2(s, "a", t0());
    CHECK(s.phase == Phase::Resolved);
    CHECK_FALSE(s.sos2);
}

TEST_CASE("nearest sources are ordered by distance") {
    const double deg = 1.0 / 111.195;
    std::vector<Region> provinces{{"P", "P", RegionKind::Province, "", 0, 0, 0, 0, 0}};
    std::vector<Region> regencies{
        {"AFF", "Affected", RegionKind::Regency, "P", 1000, 1, 0, 0.0, 0.0},
        {"S200", "Far", RegionKind::Regency, "P", 1000, 10, 5, 200 * deg, 0.0},
        {"S10", "Near", RegionKind::Regency, "P", 1000, 10, 5, 0.0, 10 * deg},
        {"S50", "Mid", RegionKind::Regency, "P", 1000, 10, 5, -50 * deg, 0.0},
        {"EMPTY", "No reserve", RegionKind::Regency, "P", 1000, 10, 0, 0.0, 1 * deg},
    };
    ReferenceDataset ref(provinces, regencies, EngineConfig{});
    auto got = nearest_sources(std::vector<RegionCode>{"AFF"}, ref);
    REQUIRE(got.size() == 3);
    CHECK(got[0].code == "S10");
    CHECK(got[1].code == "S50");
    CHECK(got[2].code == "S200");
    for (const auto& c : got) {
        const Region* r = ref.find_regency(c.code);
        CHECK(c.distance_km == doctest::Approx(km(0, 0, r->centroid_lat, r->centroid_lon)).epsilon(1e-3));
    }
    CHECK(got[0].distance_km == doctest::Approx(10).epsilon(1e-2));
    CHECK(got[2].distance_km == doctest::Approx(200).epsilon(1e-2));
    CHECK(error_code_of([&] { nearest_sources(std::vector<RegionCode>{"NOPE"}, ref); }) == ErrorCode::UnknownRegency);
}

TEST_CASE("nearest sources agree with a brute-force ranking on the seed") {
    auto seed = testing::load_seed();
    std::mt19937_64 rng(9);
    const auto& regs = seed.reference.regencies();
    for (int round = 0; round < 100; ++round) {
        std::vector<RegionCode> affected{regs[rng() % regs.size()].code};
        auto got = nearest_sources(affected, seed.reference);
        const Region* a = seed.reference.find_regency(affected[0]);
        std::vector<std::pair<double, std::string>> expect;
        for (const auto& r : regs) {
            if (r.code == a->code || r.medics_pledgeable <= 0) continue;
            expect.emplace_back(km(a->centroid_lat, a->centroid_lon, r.centroid_lat, r.centroid_lon), r.code);
        }
        std::sort(expect.begin(), expect.end());
        REQUIRE(got.size() == expect.size());
        for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i].code == expect[i].second);
    }
}

TEST_CASE("pledge validation") {
    auto ref = testing::worked_example_reference();
    EscalationState s;
    s.warning_id = "W";
    s = apply_event(s, AssessedEvent{150, t0()});
    CHECK(error_code_of([&] { record_pledge(s, {"R-NEAR", 10, t0()}, ref); }) == ErrorCode::NotEligible);
    s = issue_sos1(s, "a", {}, t0());
    CHECK(error_code_of([&] { record_pledge(s, {"R-NEAR", 0, t0()}, ref); }) == ErrorCode::InvalidPledge);
    CHECK(error_code_of([&] { record_pledge(s, {"R-NEAR", -3, t0()}, ref); }) == ErrorCode::InvalidPledge);
    CHECK(error_code_of([&] { record_pledge(s, {"ZZZ", 1, t0()}, ref); }) == ErrorCode::InvalidSource);
    CHECK(error_code_of([&] { record_pledge(s, {"R-NEAR", 101, t0()}, ref); }) == ErrorCode::InvalidSource);
    CHECK(error_code_of([&] { record_pledge(s, {kInternational, 5, t0()}, ref); }) == ErrorCode::NotEligible);
    s = record_pledge(s, {"R-NEAR", 60, t0()}, ref);
    CHECK(error_code_of([&] { record_pledge(s, {"R-NEAR", 41, t0()}, ref); }) == ErrorCode::InvalidSource);
    s = record_pledge(s, {"R-NEAR", 40, t0()}, ref);
    CHECK(s.pledged_by("R-NEAR") == 100);
    CHECK(s.shortage == 50);
}

TEST_CASE("approver is required") {
    EscalationState s;
    s.warning_id = "W";
    s = apply_event(s, AssessedEvent{10, t0()});
    CHECK(error_code_of([&] { issue_sos1(s, "", {}, t0()); }) == ErrorCode::MissingApprover);
    s = issue_sos1(s, "a", {}, t0());
    CHECK(error_code_of([&] { evaluate_sos2(s, "", t0()); }) == ErrorCode::MissingApprover);
    CHECK(error_code_of([&] { resolve(s, "", t0()); }) == ErrorCode::MissingApprover);
}

TEST_CASE("illegal transitions are rejected by the fold") {
    EscalationState s;
    s.warning_id = "W";
    CHECK(error_code_of([&] { apply_event(s, Sos1Event{"a", 1, {}, t0()}); }) == ErrorCode::IllegalTransition);
    CHECK(error_code_of([&] { apply_event(s, ResolvedEvent{"a", t0()}); }) == ErrorCode::IllegalTransition);
    auto a = apply_event(s, AssessedEvent{5, t0()});
    CHECK(error_code_of([&] { apply_event(a, AssessedEvent{5, t0()}); }) == ErrorCode::IllegalTransition);
    CHECK(error_code_of([&] { apply_event(a, Sos2Event{"a", 5, t0()}); }) == ErrorCode::IllegalTransition);
    CHECK(error_code_of([&] { apply_event(a, Sos1Event{"a", 4, {}, t0()}); }) == ErrorCode::IllegalTransition);
    CHECK(error_code_of([&] { apply_event(a, ResolvedEvent{"a", t0()}); }) == ErrorCode::IllegalTransition);
    CHECK(error_code_of([&] { apply_event(s, AssessedEvent{-1, t0()}); }) == ErrorCode::IllegalTransition);
    auto before = a;
    (void)error_code_of([&] { apply_event(a, Sos2Event{"a", 5, t0()}); });
    CHECK(a == before);
    CHECK(evaluate_sos2(issue_sos1(a, "a", {}, t0()), "a", t0()).phase == Phase::Sos2Issued);
}

TEST_CASE("safety holds over random operation sequences") {
    auto ref = testing::worked_example_reference();
    std::mt19937_64 rng(10);
    for (int i = 0; i < 10000; ++i) {
        auto err = testing::escalation_safety_trial(rng, ref, static_cast<std::int64_t>(rng() % 300));
        REQUIRE_MESSAGE(err.empty(), err);
    }
}

TEST_CASE("overdue SOS-1") {
    EscalationState s;
    s.warning_id = "W";
    s = apply_event(s, AssessedEvent{10, t0()});
    CHECK_FALSE(is_overdue(s, t0() + std::chrono::minutes(60), std::chrono::minutes(60)));
    CHECK(is_overdue(s, t0() + std::chrono::minutes(61), std::chrono::minutes(60)));
    auto issued = issue_sos1(s, "a", {}, t0() + std::chrono::minutes(30));
    CHECK_FALSE(is_overdue(issued, t0() + std::chrono::hours(5), std::chrono::minutes(60)));
    EscalationState fresh;
    fresh.warning_id = "V";
    auto none = apply_event(fresh, AssessedEvent{0, t0()});
    CHECK_FALSE(is_overdue(none, t0() + std::chrono::hours(5), std::chrono::minutes(60)));
}

TEST_CASE("phase names round trip") {
    for (auto p : {Phase::Received, Phase::Assessed, Phase::Sos1Issued, Phase::Sos2Issued, Phase::Resolved}) {
        CHECK(parse_phase(to_string(p)) == p);
    }
    CHECK(error_code_of([] { parse_phase("Pending"); }) == ErrorCode::MalformedValue);
    CHECK_FALSE(sos_request_for(EscalationState{}, PledgeEvent{}));
}
