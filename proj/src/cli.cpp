#include "quakedss/cli.hpp"

#include "quakedss/error.hpp"
#include "quakedss/event_log.hpp"
#include "quakedss/http_server.hpp"
#include "quakedss/ingest.hpp"
#include "quakedss/olap_query.hpp"
#include "quakedss/service.hpp"
#include "quakedss/simulate.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

namespace quakedss::cli {

namespace fs = std::filesystem;
namespace svc = quakedss::service;

namespace {

std::string env_or(const char* name, std::string fallback) {
    const char* v = std::getenv(name);
    return v != nullptr && *v != '\0' ? std::string(v) : fallback;
}

std::vector<HistoricalQuake> read_catalog(const fs::path& path, std::ostream& err) {
    if (!fs::exists(path)) return {};
    auto parsed = ingest::load_historical_catalog(path);
    for (const auto& e : parsed.errors) err << "skipped " << path.filename().string() << ":" << e.line << " " << e.reason << '\n';
    return parsed.records;
}

// Replays the on-disk log into memory, so read-only subcommands never append.
std::unique_ptr<svc::Service> open_readonly(const DataLayout& layout, std::ostream& err) {
    auto data = load_data_dir(layout, err);
    auto mem = std::make_shared<svc::MemoryEventStore>();
    for (const auto& ev : svc::FileEventStore(layout.log()).read_all()) mem->append(ev);
    auto service = std::make_unique<svc::Service>(std::move(data.reference), std::move(data.catalog), mem);
    service->refresh_warehouse();
    return service;
}

void print_error(std::ostream& err, const std::exception& e) { err << svc::error_body(e).dump() << '\n'; }

std::string scalar(const json& v) {
    if (v.is_number_float()) return format_number(v.get<double>());
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

void print_assessment(std::ostream& out, const json& view, const std::string& phase) {
    const auto& a = view.at("assessment");
    out << "warning " << a.at("warning_id").get<std::string>() << '\n';
    out << "band " << a.at("magnitude_band").get<std::string>() << '\n';
    out << "affected_regencies " << join(a.at("area").at("regencies").get<std::vector<std::string>>(), ',') << '\n';
    out << "low_confidence " << scalar(a.at("area").at("low_confidence")) << '\n';
    out << "W " << scalar(a.at("inputs").at("W")) << '\n';
    out << "Sn " << scalar(a.at("inputs").at("Sn")) << '\n';
    out << "Jtk " << scalar(a.at("inputs").at("Jtk")) << '\n';
    out << "Tk " << scalar(a.at("medics").at("Tk")) << '\n';
    out << "Ktk " << scalar(a.at("medics").at("Ktk")) << '\n';
    const auto& c = a.at("checklist");
    for (const char* key : {"medics_required", "medics_available", "medics_shortage", "medics_international",
                            "predicted_deaths", "predicted_injured", "volunteers_national", "volunteers_international",
                            "tents", "shelter_sites", "sanitation_units", "kitchens", "rice_kg", "baby_food_kg",
                            "blankets", "total_cost", "buildings_at_risk", "damage_cost"}) {
        out << key << ' ' << scalar(c.at(key)) << '\n';
    }
    for (const auto& item : c.at("custom")) {
        out << "custom." << item.at("name").get<std::string>() << ' ' << scalar(item.at("quantity")) << ' '
            << item.at("unit").get<std::string>() << '\n';
    }
    for (const auto& an : a.at("casualties").at("analogs_used")) {
        out << "analog " << an.at("quake_id").get<std::string>() << " weight=" << scalar(an.at("weight"))
            << " distance=" << scalar(an.at("distance")) << '\n';
    }
    out << "phase " << phase << '\n';
}

std::atomic<svc::HttpServer*> g_server{nullptr};

extern "C" void on_signal(int) {
    if (auto* s = g_server.load()) s->stop();
}

int cmd_serve(const DataLayout& layout, const std::string& listen, const std::string& token, int refresh_seconds,
              std::ostream& out, std::ostream& err) {
    auto data = load_data_dir(layout, err);
    svc::ServiceOptions options;
    options.write_token = token;
    options.outbox_dir = layout.outbox();
    svc::Service service(std::move(data.reference), std::move(data.catalog),
                         std::make_shared<svc::FileEventStore>(layout.log()), options);
    auto loaded = service.refresh_warehouse();

    auto [host, port] = svc::parse_listen_address(listen);
    svc::HttpServer server(service);
    int bound = server.bind(host, port);
    if (bound < 0) throw Error(ErrorCode::UnreadableSource, listen, "cannot bind");
    out << "listening " << host << ":" << bound << " log_seq=" << service.sequence() << " facts_loaded=" << loaded
        << '\n'
        << std::flush;

    std::mutex m;
    std::condition_variable cv;
    bool stopping = false;
    std::thread refresher([&] {
        std::unique_lock lock(m);
        while (!cv.wait_for(lock, std::chrono::seconds(refresh_seconds), [&] { return stopping; })) {
            try {
                service.set_catalog(read_catalog(layout.catalog(), err));
                service.refresh_warehouse();
            } catch (const std::exception& e) {
                print_error(err, e);
            }
        }
    });

    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    server.run();
    g_server = nullptr;
    {
        std::lock_guard lock(m);
        stopping = true;
    }
    cv.notify_all();
    refresher.join();
    return kOk;
}

int cmd_ingest(const fs::path& regions, const fs::path& catalog_path, const std::optional<fs::path>& warnings,
               const std::optional<DataLayout>& install, bool as_json, std::ostream& out, std::ostream& err) {
    std::vector<ingest::LineError> diagnostics;
    DataLayout src{regions};
    auto ref = ingest::load_reference_data(src.provinces(), src.regencies(), src.config(), &diagnostics);
    for (const auto& d : diagnostics) err << "skipped regions:" << d.line << " " << d.reason << '\n';

    auto catalog = ingest::load_historical_catalog(catalog_path);
    for (const auto& e : catalog.errors) err << "skipped catalog:" << e.line << " " << e.reason << '\n';

    ingest::ParseResult<Warning> feed;
    if (warnings) {
        std::ifstream in(*warnings);
        if (!in) throw Error(ErrorCode::UnreadableSource, warnings->string());
        feed = ingest::parse_warning_feed(in);
        for (const auto& e : feed.errors) err << "skipped warnings:" << e.line << " " << e.reason << '\n';
    }

    std::int64_t posted = 0, rejected = static_cast<std::int64_t>(feed.errors.size());
    if (install) {
        fs::create_directories(install->root);
        ingest::save_reference_data(ref, install->root);
        std::ofstream cat(install->catalog());
        ingest::write_catalog(cat, catalog.records);
        cat.close();
        svc::ServiceOptions options;
        options.outbox_dir = install->outbox();
        svc::Service service(ref, catalog.records, std::make_shared<svc::FileEventStore>(install->log()), options);
        service.refresh_warehouse();
        for (const auto& w : feed.records) {
            try {
                service.post_warning(ingest::to_feed_line(w));
                ++posted;
            } catch (const Error& e) {
                print_error(err, e);
                ++rejected;
            }
        }
    }

    json counts{{"provinces", ref.provinces().size()},
                {"regencies", ref.regencies().size()},
                {"regions_rejected", diagnostics.size()},
                {"catalog", catalog.records.size()},
                {"catalog_rejected", catalog.errors.size()},
                {"warnings", feed.records.size()},
                {"warnings_posted", posted},
                {"warnings_rejected", rejected}};
    if (as_json) {
        out << counts.dump() << '\n';
    } else {
        for (const char* k : {"provinces", "regencies", "regions_rejected", "catalog", "catalog_rejected", "warnings",
                              "warnings_posted", "warnings_rejected"}) {
            out << k << ' ' << counts.at(k).dump() << '\n';
        }
    }
    return kOk;
}

} // namespace

DataSet load_data_dir(const DataLayout& layout, std::ostream& err) {
    std::vector<ingest::LineError> diagnostics;
    auto ref = ingest::load_reference_data(layout.provinces(), layout.regencies(), layout.config(), &diagnostics);
    for (const auto& d : diagnostics) err << "skipped regions:" << d.line << " " << d.reason << '\n';
    return {std::move(ref), read_catalog(layout.catalog(), err)};
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Earthquake response decision support"};
    app.name("quakedss");
    app.require_subcommand(1);
    app.fallthrough();

    std::string data_dir = env_or("QUAKEDSS_DATA", "data");
    bool as_json = false;
    auto* data_opt = app.add_option("--data", data_dir, "Data directory (env QUAKEDSS_DATA)");
    app.add_flag("--json", as_json, "One JSON object per line");

    auto* serve = app.add_subcommand("serve", "Run the HTTP service");
    std::string listen = env_or("QUAKEDSS_LISTEN", "127.0.0.1:8080");
    std::string token = env_or("QUAKEDSS_TOKEN", "");
    int refresh_seconds = 60;
    serve->add_option("--listen", listen, "host:port (env QUAKEDSS_LISTEN)");
    serve->add_option("--token", token, "Write token (env QUAKEDSS_TOKEN)");
    serve->add_option("--refresh-seconds", refresh_seconds, "Warehouse refresh interval")->check(CLI::PositiveNumber);

    auto* ingest_cmd = app.add_subcommand("ingest", "Validate input files, installing them with --data");
    std::string regions_dir, catalog_file, warnings_file;
    ingest_cmd->add_option("--regions", regions_dir, "Directory with provinces.csv, regencies.csv, config.json")
        ->required();
    ingest_cmd->add_option("--catalog", catalog_file, "Historical quake CSV")->required();
    auto* warnings_opt = ingest_cmd->add_option("--warnings", warnings_file, "Warning feed, one JSON object per line");

    auto* assess_cmd = app.add_subcommand("assess", "Print the checklist for a warning");
    std::string warning_id;
    assess_cmd->add_option("WARNING_ID", warning_id)->required();

    auto* olap_cmd = app.add_subcommand("olap", "Query the historical warehouse");
    std::string group_by;
    std::vector<std::string> filters, ops;
    olap_cmd->add_option("--group-by", group_by, "e.g. geography:province,time:year")->required();
    olap_cmd->add_option("--filter", filters, "DIM[:LEVEL]=M1|M2")->allow_extra_args(false);
    olap_cmd->add_option("--op", ops, "roll_up:DIM, drill_down:DIM, slice:DIM=M, dice:DIM=A|B")->allow_extra_args(false);

    auto* sim_cmd = app.add_subcommand("simulate", "Run a seeded synthetic scenario end to end");
    simulate::SimulationOptions sim;
    double magnitude = 0.0;
    std::string sim_out;
    sim_cmd->add_option("--seed", sim.seed)->required();
    sim_cmd->add_option("--regencies", sim.regencies)->check(CLI::Range(4, 500));
    auto* mag_opt = sim_cmd->add_option("--magnitude", magnitude)->check(CLI::Range(0.0, 10.0));
    sim_cmd->add_option("--out", sim_out, "Also write the generated inputs to this directory");

    auto* replay_cmd = app.add_subcommand("replay", "Verify the event log and print the state hash");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << json{{"error", "Usage"}, {"message", e.what()}}.dump() << '\n';
        return kUsageError;
    }

    DataLayout layout{data_dir};
    try {
        if (*serve) return cmd_serve(layout, listen, token, refresh_seconds, out, err);
        if (*ingest_cmd) {
            std::optional<fs::path> warnings;
            if (*warnings_opt) warnings = warnings_file;
            std::optional<DataLayout> install;
            if (*data_opt) install = layout;
            return cmd_ingest(regions_dir, catalog_file, warnings, install, as_json, out, err);
        }
        if (*assess_cmd) {
            auto service = open_readonly(layout, err);
            auto view = service->get_assessment(warning_id);
            auto esc = service->get_escalation(warning_id);
            if (as_json) {
                view["phase"] = esc.at("phase");
                out << view.dump() << '\n';
            } else {
                print_assessment(out, view, esc.at("phase").get<std::string>());
            }
            return kOk;
        }
        if (*olap_cmd) {
            auto service = open_readonly(layout, err);
            warehouse::OlapQuery q;
            q.axes = warehouse::parse_group_by(group_by);
            for (const auto& f : filters) q.filters.push_back(warehouse::parse_filter(f));
            for (const auto& o : ops) q.ops.push_back(warehouse::parse_op(o));
            auto snapshot = service->snapshot();
            auto table = warehouse::to_table(warehouse::run_query(snapshot.warehouse, q));
            out << (as_json ? warehouse::render_json_lines(table) : warehouse::render_text(table));
            return kOk;
        }
        if (*sim_cmd) {
            if (*mag_opt) sim.magnitude = magnitude;
            auto scenario = simulate::generate_scenario(sim);
            if (!sim_out.empty()) {
                DataLayout target{sim_out};
                fs::create_directories(target.root);
                ingest::save_reference_data(scenario.reference, target.root);
                std::ofstream cat(target.catalog());
                ingest::write_catalog(cat, scenario.catalog);
                std::ofstream feed(target.root / "warnings.jsonl");
                feed << ingest::to_feed_line(scenario.warning) << '\n';
            }
            auto report = simulate::run_scenario(scenario);
            if (as_json) {
                out << json{{"lines", report.lines},
                            {"final_phase", report.final_phase},
                            {"log_events", report.log_length},
                            {"state_hash", hex64(report.state_hash)}}
                           .dump()
                    << '\n';
            } else {
                for (const auto& l : report.lines) out << l << '\n';
            }
            return kOk;
        }
        if (*replay_cmd) {
            auto data = load_data_dir(layout, err);
            auto log = svc::FileEventStore(layout.log()).read_all();
            auto first = svc::replay_log(log, data.reference).hash();
            auto second = svc::replay_log(log, data.reference).hash();
            if (first != second) throw Error(ErrorCode::CorruptLog, "replay", "state hash differs between replays");
            if (as_json) {
                out << json{{"events", log.size()}, {"state_hash", hex64(first)}}.dump() << '\n';
            } else {
                out << "events " << log.size() << '\n' << "state_hash " << hex64(first) << '\n';
            }
            return kOk;
        }
    } catch (const Error& e) {
        print_error(err, e);
        return kDomainError;
    } catch (const json::exception& e) {
        print_error(err, e);
        return kDomainError;
    } catch (const fs::filesystem_error& e) {
        print_error(err, e);
        return kDomainError;
    }
    return kUsageError;
}

} // namespace quakedss::cli
