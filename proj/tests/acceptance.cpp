// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Plain main so it runs without the unit-test framework.

#include "oracles.hpp"
#include "quakedss/cli.hpp"
#include "quakedss/simulate.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

using namespace quakedss;
namespace esc = quakedss::escalation;
namespace svc = quakedss::service;
namespace wh = quakedss::warehouse;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

class Checker {
public:
    void expect(bool cond, const std::string& what) {
        if (!cond && out_.ok) {
            out_.ok = false;
            out_.detail = what;
        }
    }
    Outcome& outcome() { return out_; }

private:
    Outcome out_;
};

int failures = 0;

void criterion(const std::string& name, double limit_seconds, const std::function<void(Checker&)>& body) {
    Checker c;
    auto start = std::chrono::steady_clock::now();
    try {
        body(c);
    } catch (const std::exception& e) {
        c.expect(false, std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (limit_seconds > 0 && secs >= limit_seconds) {
        c.expect(false, "took " + std::to_string(secs) + " s, limit " + std::to_string(limit_seconds) + " s");
    }
    auto& o = c.outcome();
    if (!o.ok) ++failures;
    std::printf("%s  %-28s %8.3f s%s%s\n", o.ok ? "PASS" : "FAIL", name.c_str(), secs, o.detail.empty() ? "" : "  ",
                o.detail.c_str());
    std::fflush(stdout);
}

Timestamp t0() { return Timestamp{std::chrono::sys_days{std::chrono::year{2030} / 1 / 1}}; }

// Independent legality rule for a raw escalation event.
bool admissible(esc::Phase phase, std::int64_t shortage, const esc::Event& e) {
    using esc::Phase;
    if (const auto* a = std::get_if<esc::AssessedEvent>(&e)) return phase == Phase::Received && a->shortage >= 0;
    if (const auto* s = std::get_if<esc::Sos1Event>(&e)) {
        return phase == Phase::Assessed && shortage > 0 && !s->approver.empty() && s->amount == shortage;
    }
    if (const auto* p = std::get_if<esc::PledgeEvent>(&e)) {
        bool open = phase == Phase::Sos1Issued || phase == Phase::Sos2Issued;
        bool intl = p->pledge.source_region_code == esc::kInternational;
        return open && p->pledge.medics_pledged >= 1 && !p->pledge.source_region_code.empty() &&
               (!intl || phase == Phase::Sos2Issued);
    }
    if (const auto* s = std::get_if<esc::Sos2Event>(&e)) {
        return phase == Phase::Sos1Issued && shortage > 0 && !s->approver.empty() && s->amount == shortage;
    }
    const auto& r = std::get<esc::ResolvedEvent>(e);
    return phase != Phase::Received && phase != Phase::Resolved && shortage == 0 && !r.approver.empty();
}

esc::Event random_event(std::mt19937_64& rng, std::int64_t shortage) {
    std::string approver = rng() % 10 == 0 ? "" : "officer";
    auto amount = rng() % 6 == 0 ? static_cast<std::int64_t>(rng() % 200) : shortage;
    switch (rng() % 6) {
    case 0: return esc::AssessedEvent{static_cast<std::int64_t>(rng() % 300) - 10, t0()};
    case 1: return esc::Sos1Event{approver, amount, {}, t0()};
    case 2:
    case 3: {
        const char* sources[] = {"R-NEAR", "R-FAR", "INTERNATIONAL", ""};
        return esc::PledgeEvent{{sources[rng() % 4], static_cast<std::int64_t>(rng() % 120) - 5, t0()}};
    }
    case 4: return esc::Sos2Event{approver, amount, t0()};
    default: return esc::ResolvedEvent{approver, t0()};
    }
}

} // namespace

int main() {
    std::printf("acceptance criteria\n");

    criterion("medic-equations", 1.0, [](Checker& c) {
        std::mt19937_64 rng(20300101);
        for (int i = 0; i < 10000; ++i) {
            std::int64_t w = i % 50 == 0 ? 0 : static_cast<std::int64_t>(rng() % 1'000'000'000);
            if (i % 7 == 0) w = static_cast<std::int64_t>(rng() % 2000);
            std::int64_t sn = 1 + static_cast<std::int64_t>(rng() % (i % 3 == 0 ? 10 : 5000));
            std::int64_t jtk = static_cast<std::int64_t>(rng() % 3'000'000);
            auto tk = required_medics(w, sn);
            auto ktk = medic_shortage(tk, jtk);
            if (w > 0) c.expect((tk - 1) * sn < w && w <= tk * sn, "Tk bound fails at W=" + std::to_string(w));
            else c.expect(tk == 0, "Tk nonzero at W=0");
            c.expect(tk == testing::medics_oracle(w, sn), "Tk differs from oracle");
            c.expect(ktk == std::max<std::int64_t>(0, tk - jtk), "Ktk differs from max(0, Tk-Jtk)");
        }
    });

    criterion("worked-composition", 0, [](Checker& c) {
        auto ref = testing::worked_example_reference();
        std::vector<HistoricalQuake> cat{testing::quake("A", 2001, 6.0, 100, 100000),
                                         testing::quake("B", 2002, 7.0, 1000, 500000)};
        Warning w;
        w.event.id = "W";
        w.event.date = std::chrono::year{2030} / 1 / 1;
        w.event.magnitude = 6.5;
        w.event.affected_regencies = {"R-AFF"};
        auto out = esc::assess(w, ref, cat, t0());
        c.expect(out.assessment.area.population == 100000, "W != 100000");
        c.expect(out.assessment.inputs.standard == 500, "Sn != 500");
        c.expect(out.assessment.inputs.medics_available == 50, "Jtk != 50");
        c.expect(out.assessment.medics.required == 200, "Tk != 200");
        c.expect(out.assessment.medics.shortage == 150, "Ktk != 150");
        c.expect(esc::sos1_pending(out.state), "not SOS-1 eligible");
        auto s = esc::issue_sos1(out.state, "officer", esc::nearest_sources(w.event.affected_regencies, ref), t0());
        s = esc::record_pledge(s, {"R-NEAR", 100, t0()}, ref);
        s = esc::evaluate_sos2(s, "officer", t0());
        c.expect(s.phase == esc::Phase::Sos2Issued, "SOS-2 not issued");
        c.expect(s.sos2 && s.sos2->amount == 50, "SOS-2 amount != 50");
        auto req = esc::sos_request_for(s, s.history.back());
        c.expect(req && req->stage == 2 && req->amount == 50, "SOS-2 request document wrong");
    });

    criterion("seed-catalog", 0, [](Checker& c) {
        auto seed = testing::load_seed();
        c.expect(seed.catalog.size() == 5, "catalog does not hold five quakes");
        wh::FactStore store(wh::Schema::from_reference(seed.reference));
        store.load_facts(wh::extract_deferred(wh::source_rows_from_catalog(seed.catalog, seed.reference), {"catalog", {}}));
        auto cube = wh::build_cube(store, {{wh::Dimension::Time, wh::Level::Day},
                                           {wh::Dimension::Geography, wh::Level::Regency},
                                           {wh::Dimension::Magnitude, wh::Level::Band}});
        auto diced = wh::dice(cube, {{wh::Dimension::Magnitude, {"8.0+"}}});
        std::map<wh::Coordinate, wh::Measures> expect{
            {{"2004-12-26", "ID-AC-BNA", "8.0+"}, {170000, 100000, 120000, 1}},
            {{"2005-03-28", "ID-SU-NIA", "8.0+"}, {1000, 3000, 13000, 1}},
        };
        c.expect(diced.cells() == expect, "band 8.0+ dice is not exactly Aceh and Nias");

        const std::int64_t w = 2'000'000;
        auto pred = predict_casualties(9.0, w, seed.catalog, 1);
        auto ranking = testing::analog_ranking(9.0, w, seed.catalog);
        c.expect(pred.analogs_used.size() == 1, "k=1 did not use one analog");
        c.expect(!pred.analogs_used.empty() && pred.analogs_used[0].quake_id == ranking.front(),
                 "analog differs from exhaustive ranking");
        c.expect(ranking.front() == "ACEH-2004", "nearest analog is not Aceh");
    });

    criterion("olap-conservation", 10.0, [](Checker& c) {
        auto seed = testing::load_seed();
        std::mt19937_64 rng(500100);
        auto facts = testing::random_facts(rng, seed.reference, 500);
        wh::FactStore store(wh::Schema::from_reference(seed.reference));
        store.load_facts(testing::batch_of(facts));
        testing::MemberOracle members(seed.reference);
        for (int chain = 0; chain < 100; ++chain) {
            auto err = testing::olap_chain_trial(rng, store, facts, members, {8, false});
            c.expect(err.empty(), "chain " + std::to_string(chain) + ": " + err);
        }
    });

    criterion("etl-semantics", 0, [](Checker& c) {
        auto seed = testing::load_seed();
        std::mt19937_64 rng(1000);
        auto facts = testing::random_facts(rng, seed.reference, 1000);
        std::vector<wh::SourceRow> rows;
        for (const auto& f : facts) rows.push_back({f, t0() + std::chrono::seconds(rng() % 5000)});
        for (int round = 0; round < 20; ++round) {
            wh::SourceWatermark mark{"s", t0() + std::chrono::seconds(rng() % 5000)};
            auto batch = wh::extract_deferred(rows, mark);
            std::vector<wh::SourceRow> brute;
            for (const auto& r : rows) {
                if (r.modified_at > mark.last_extracted_at) brute.push_back(r);
            }
            c.expect(batch.rows == brute, "extract differs from brute-force filter");
        }

        svc::ServiceState state;
        state.warehouse = wh::FactStore(wh::Schema::from_reference(seed.reference));
        auto batch = wh::extract_deferred(rows, {"s", {}});
        state.warehouse.load_facts(batch);
        auto once = state.hash();
        auto stats = state.warehouse.load_facts(batch);
        c.expect(stats.inserted == 0, "second load inserted rows");
        c.expect(state.hash() == once, "double load changed the state hash");
        auto partial = wh::extract_deferred(rows, {"s", t0() + std::chrono::seconds(2500)});
        state.warehouse.load_facts(partial);
        c.expect(state.hash() == once, "reloading a newer subset changed the state hash");
    });

    criterion("escalation-safety", 0, [](Checker& c) {
        auto ref = testing::worked_example_reference();
        std::mt19937_64 rng(10000);
        std::size_t rejected = 0, sos2_reached = 0;
        for (int seq = 0; seq < 10000; ++seq) {
            esc::EscalationState s;
            s.warning_id = "W";
            bool sos1_seen = false;
            std::size_t len = 1 + rng() % 10;
            for (std::size_t i = 0; i < len; ++i) {
                auto e = i == 0 && rng() % 4 != 0 ? esc::Event{esc::AssessedEvent{static_cast<std::int64_t>(rng() % 300), t0()}}
                                                   : random_event(rng, s.shortage);
                bool legal = admissible(s.phase, s.shortage, e);
                auto before = s;
                auto code = testing::error_code_of([&] { s = esc::apply_event(s, e); });
                if (!legal) {
                    ++rejected;
                    c.expect(code == ErrorCode::IllegalTransition, "illegal event not rejected");
                    c.expect(s == before, "rejected event changed the state");
                    continue;
                }
                c.expect(!code, "legal event rejected");
                c.expect(s.shortage >= 0, "negative shortage");
                if (std::holds_alternative<esc::Sos2Event>(e)) {
                    ++sos2_reached;
                    c.expect(sos1_seen, "SOS-2 without prior SOS-1");
                    c.expect(before.shortage > 0, "SOS-2 without positive shortage");
                }
                if (s.phase == esc::Phase::Sos1Issued) sos1_seen = true;
            }
            auto err = testing::escalation_safety_trial(rng, ref, static_cast<std::int64_t>(rng() % 300));
            c.expect(err.empty(), err);
        }
        c.expect(rejected > 0 && sos2_reached > 0, "fuzz never exercised SOS-2 or rejection");
    });

    criterion("replay-determinism", 0, [](Checker& c) {
        auto seed = testing::load_seed();
        auto log = testing::generate_log(100);
        c.expect(log.size() == 100, "log generator fell short");
        auto a = svc::replay_log(log, seed.reference).hash();
        auto b = svc::replay_log(log, seed.reference).hash();
        c.expect(a == b, "two replays differ");
        for (std::size_t k = 0; k <= log.size(); ++k) {
            auto st = svc::replay_log(std::span<const svc::CommandEvent>(log).first(k), seed.reference);
            c.expect(st.last_sequence == k, "prefix " + std::to_string(k) + " replayed short");
        }
        // The same truncations read back through the on-disk encoding.
        std::string text;
        for (std::size_t k = 0; k <= log.size(); ++k) {
            std::istringstream in(text);
            auto parsed = svc::parse_log(in);
            c.expect(parsed.size() == k, "encoded prefix " + std::to_string(k) + " lost events");
            svc::replay_log(parsed, seed.reference);
            if (k < log.size()) text += svc::encode(log[k]) + "\n";
        }
    });

    criterion("end-to-end-simulate", 5.0, [](Checker& c) {
        auto run = [] {
            std::ostringstream out, err;
            int code = cli::run_cli({"simulate", "--seed", "42"}, out, err);
            return std::make_pair(code, out.str());
        };
        auto [code1, first] = run();
        auto [code2, second] = run();
        c.expect(code1 == 0 && code2 == 0, "simulate exited nonzero");
        c.expect(first == second, "output differs between runs");
        for (const char* step : {"\nassessment", "\nsos1", "\npledge", "\nsos2", "\nfinal"}) {
            c.expect(("\n" + first).find(step) != std::string::npos, std::string("missing step") + step);
        }
        auto report = simulate::run_scenario(simulate::generate_scenario({}));
        c.expect(report.final_phase == "Resolved", "scenario did not resolve");
    });

    std::printf("%s: %d failed\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
    return failures == 0 ? 0 : 1;
}
