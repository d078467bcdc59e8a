#include <doctest.h>

#include "oracles.hpp"

#include <fstream>
#include <random>
#include <sstream>

using namespace quakedss;
using testing::error_code_of;
using testing::TempDir;

namespace {

std::string feed_line(const std::string& id, const std::string& magnitude = "6.1") {
    return R"({"id":")" + id + R"(","issued_at":"2030-01-01T00:00:00Z","date":"2030-01-01","time":"00:00:00",)" +
           R"("latitude":-7.9,"longitude":110.3,"magnitude":)" + magnitude + R"(,"affected_regencies":["ID-YO-BTL"]})";
}

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

const char* kProvinces = "code,name,centroid_lat,centroid_lon\nP1,One,0,0\nP2,Two,1,1\n";

} // namespace

TEST_CASE("warning feed: all valid") {
    std::istringstream in(feed_line("W1") + "\n" + feed_line("W2") + "\n" + feed_line("W3") + "\n");
    auto r = ingest::parse_warning_feed(in);
    CHECK(r.records.size() == 3);
    CHECK(r.errors.empty());
    CHECK(r.records[0].id() == "W1");
    CHECK(r.records[2].id() == "W3");
    CHECK(r.records[0].source == "BMG-like feed");
}

TEST_CASE("warning feed: bad magnitude isolated at its line") {
    std::istringstream in(feed_line("W1") + "\n" + feed_line("W2") + "\n" + feed_line("W3", "\"abc\"") + "\n");
    auto r = ingest::parse_warning_feed(in);
    CHECK(r.records.size() == 2);
    REQUIRE(r.errors.size() == 1);
    CHECK(r.errors[0].line == 3);
    CHECK(r.errors[0].reason.find("magnitude") != std::string::npos);
}

TEST_CASE("warning feed: empty stream") {
    std::istringstream in("");
    auto r = ingest::parse_warning_feed(in);
    CHECK(r.records.empty());
    CHECK(r.errors.empty());
}

TEST_CASE("warning feed: every line is accounted for") {
    std::mt19937_64 rng(3);
    for (int round = 0; round < 50; ++round) {
        std::string text;
        std::size_t lines = 1 + rng() % 30;
        for (std::size_t i = 0; i < lines; ++i) {
            switch (rng() % 5) {
            case 0: text += "not json\n"; break;
            case 1: text += feed_line("DUP") + "\n"; break;
            case 2: text += "\n"; break;
            default: text += feed_line("W" + std::to_string(i)) + "\n";
            }
        }
        std::istringstream in(text);
        auto r = ingest::parse_warning_feed(in);
        CHECK(r.records.size() + r.errors.size() == lines);
    }
}

TEST_CASE("feed line round trip") {
    std::istringstream in(feed_line("W1") + "\n");
    auto w = ingest::parse_warning_feed(in).records.at(0);
    w.risk_note = "coastal, \"high\"";
    auto again = ingest::parse_warning_record(ingest::to_feed_line(w));
    CHECK(again == w);
}

TEST_CASE("reference data: happy path, orphan, duplicate, header") {
    TempDir dir;
    auto prov = dir.path() / "provinces.csv";
    auto reg = dir.path() / "regencies.csv";
    auto cfg = dir.path() / "config.json";
    write_file(prov, kProvinces);
    write_file(cfg, R"({"sn": 500})");
    const std::string header = "code,province_code,name,population,medics_available,medics_pledgeable,centroid_lat,centroid_lon\n";

    SUBCASE("seven regions") {
        write_file(reg, header + "R1,P1,a,100,10,1,0,0\nR2,P1,b,100,10,1,0,0\nR3,P2,c,100,10,1,0,0\n"
                                 "R4,P2,d,100,10,1,0,0\nR5,P2,e,100,10,1,0,0\n");
        auto ref = ingest::load_reference_data(prov, reg, cfg);
        CHECK(ref.region_count() == 7);
        CHECK(ref.sn() == 500);
        CHECK(ref.find_regency("R3")->parent_code == "P2");
    }
    SUBCASE("orphan") {
        write_file(reg, header + "R1,XX,a,100,10,1,0,0\n");
        try {
            ingest::load_reference_data(prov, reg, cfg);
            FAIL("expected OrphanRegency");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::OrphanRegency);
            CHECK(e.subject() == "XX");
        }
    }
    SUBCASE("duplicate") {
        write_file(reg, header + "R1,P1,a,100,10,1,0,0\nR1,P2,b,100,10,1,0,0\n");
        CHECK(error_code_of([&] { ingest::load_reference_data(prov, reg, cfg); }) == ErrorCode::DuplicateCode);
    }
    SUBCASE("bad header") {
        write_file(reg, "code,name\nR1,a\n");
        CHECK(error_code_of([&] { ingest::load_reference_data(prov, reg, cfg); }) == ErrorCode::BadHeader);
    }
    SUBCASE("malformed row skipped with a diagnostic") {
        write_file(reg, header + "R1,P1,a,100,10,1,0,0\nR2,P1,b,lots,10,1,0,0\n");
        std::vector<ingest::LineError> diag;
        auto ref = ingest::load_reference_data(prov, reg, cfg, &diag);
        CHECK(ref.regencies().size() == 1);
        REQUIRE(diag.size() == 1);
        CHECK(diag[0].line == 3);
    }
    SUBCASE("missing file") {
        CHECK(error_code_of([&] { ingest::load_reference_data(prov, dir.path() / "nope.csv", cfg); }) ==
              ErrorCode::UnreadableSource);
    }
    SUBCASE("unknown coefficient rejected") {
        write_file(reg, header + "R1,P1,a,100,10,1,0,0\n");
        write_file(cfg, R"({"coefficients": {"rice_per_day": 1}})");
        CHECK(error_code_of([&] { ingest::load_reference_data(prov, reg, cfg); }) == ErrorCode::InvalidCoefficient);
    }
}

TEST_CASE("reference data round trip") {
    auto seed = testing::load_seed();
    TempDir dir;
    ingest::save_reference_data(seed.reference, dir.path());
    auto again = ingest::load_reference_data(dir.path() / "provinces.csv", dir.path() / "regencies.csv",
                                             dir.path() / "config.json");
    CHECK(again == seed.reference);
}

TEST_CASE("seed catalog rows") {
    auto seed = testing::load_seed();
    REQUIRE(seed.catalog.size() == 5);
    auto find = [&](const std::string& id) -> const HistoricalQuake& {
        for (const auto& h : seed.catalog) {
            if (h.event.id == id) return h;
        }
        FAIL("missing " << id);
        throw;
    };
    const auto& aceh = find("ACEH-2004");
    CHECK(aceh.event.date == std::chrono::year{2004} / 12 / 26);
    CHECK(aceh.event.magnitude == doctest::Approx(9.1));
    CHECK(aceh.deaths == 170000);
    const auto& yogya = find("YOGYA-2006");
    CHECK(yogya.event.date == std::chrono::year{2006} / 5 / 27);
    CHECK(yogya.event.magnitude == doctest::Approx(5.9));
    CHECK(yogya.deaths == 5000);
    const auto& sichuan = find("SICHUAN-2008");
    CHECK(sichuan.event.date == std::chrono::year{2008} / 5 / 12);
    CHECK(sichuan.event.magnitude == doctest::Approx(7.9));
    CHECK(sichuan.deaths == 40000);
    CHECK(find("NIAS-2005").deaths == 1000);
    CHECK(find("JABAR-2009").event.magnitude == doctest::Approx(7.3));
    for (const auto& h : seed.catalog) CHECK(h.deaths + h.injured <= h.exposed_population);
}

TEST_CASE("catalog diagnostics and counts") {
    std::string text = "id,date,time,latitude,longitude,magnitude,region_label,deaths,injured,buildings_destroyed,"
                       "exposed_population\n"
                       "A,2004-12-26,00:58:53,3.3,95.8,9.1,R1,10,10,0,100\n"
                       "B,2004-12-27,00:00,3.3,95.8,9.1,R1,90,20,0,100\n"   // deaths + injured > exposed
                       "C,2004-12-28,00:00,3.3,95.8,11,R1,1,1,0,100\n"      // magnitude out of range
                       "A,2004-12-29,00:00,3.3,95.8,6,R1,1,1,0,100\n"       // duplicate id
                       "D,2004-12-30,00:00,3.3,95.8,6,R1;R2,1,1,0,0\n"      // exposed must be positive
                       "E,2004-12-31,00:00,3.3,95.8,6,R1;R2,1,1,0,10\n";
    std::istringstream in(text);
    auto r = ingest::parse_historical_catalog(in);
    CHECK(r.records.size() == 2);
    CHECK(r.errors.size() == 4);
    CHECK(r.records.size() + r.errors.size() == 6);
    CHECK(r.records[1].event.affected_regencies == std::vector<RegionCode>{"R1", "R2"});
    std::vector<std::size_t> lines;
    for (const auto& e : r.errors) lines.push_back(e.line);
    CHECK(lines == std::vector<std::size_t>{3, 4, 5, 6});
}

TEST_CASE("catalog write and reparse") {
    auto seed = testing::load_seed();
    std::ostringstream out;
    ingest::write_catalog(out, seed.catalog);
    std::istringstream in(out.str());
    auto r = ingest::parse_historical_catalog(in);
    CHECK(r.errors.empty());
    CHECK(r.records == seed.catalog);
}

TEST_CASE("catalog bad header") {
    std::istringstream in("id,when\nA,b\n");
    CHECK(error_code_of([&] { ingest::parse_historical_catalog(in); }) == ErrorCode::BadHeader);
}
