#pragma once

#include "quakedss/error.hpp"
#include "quakedss/escalation.hpp"
#include "quakedss/estimator.hpp"
#include "quakedss/event_log.hpp"
#include "quakedss/json_io.hpp"
#include "quakedss/reference.hpp"
#include "quakedss/warehouse.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

namespace quakedss::service {

inline const std::string kCatalogSource = "historical";
inline const std::string kAutoApprover = "system:auto";

/**
 * ServiceState - everything derived from the event log: warnings,
 * assessments, escalation instances and the warehouse.
 */
struct ServiceState {
    std::map<std::string, Warning> warnings;
    std::map<std::string, Assessment> assessments;
    std::map<std::string, escalation::EscalationState> escalations;
    warehouse::FactStore warehouse;
    std::uint64_t last_sequence = 0;

    json to_json() const;
    std::uint64_t hash() const;
};

// Applies one logged event. Throws on an event the state cannot admit.
void apply(ServiceState& state, const CommandEvent& event);

// Folds a whole log over an empty state. Any failure is reported as
// Error(CorruptLog, "<sequence>").
ServiceState replay_log(std::span<const CommandEvent> log, const ReferenceDataset& ref);

struct Request {
    std::string method;  // "GET" / "POST"
    std::string path;    // "/warnings", "/escalations/W1/sos1", ...
    std::multimap<std::string, std::string> query;
    std::string body;
    std::string token;   // bearer token presented by the caller, if any
};

struct Response {
    int status = 200;
    json body;
};

struct ServiceOptions {
    // Empty means writes are not token-gated.
    std::string write_token;
    std::function<Timestamp()> clock;
    // SOS request documents are written here when set.
    std::optional<std::filesystem::path> outbox_dir;
    // Test hook run after each durable append, before the event is applied.
    std::function<void(const CommandEvent&)> after_append;
};

Timestamp system_clock_now();

struct WhatIfRequest {
    std::optional<std::int64_t> affected_population;
    std::optional<std::int64_t> standard;
    std::optional<double> magnitude;
    std::optional<std::vector<RegionCode>> affected_regencies;
    std::map<std::string, double> coefficient_deltas;
};

WhatIfRequest parse_whatif(const json& body);

class Service {
public:
    // Replays everything already in `store`; throws CorruptLog on a bad log.
    Service(ReferenceDataset ref, std::vector<HistoricalQuake> catalog, std::shared_ptr<EventStore> store,
            ServiceOptions options = {});

    Response handle(const Request& request);

    // Extracts catalog rows newer than the warehouse watermark and logs them
    // as one etl-batch. Returns the number of rows loaded.
    std::size_t refresh_warehouse();
    // Swaps in a re-read catalog (used by the periodic refresh in serve).
    void set_catalog(std::vector<HistoricalQuake> catalog);

    std::uint64_t sequence() const;
    std::uint64_t state_hash() const;
    ServiceState snapshot() const;

    const ReferenceDataset& reference() const { return ref_; }
    const std::vector<HistoricalQuake>& catalog() const { return catalog_; }

    // Typed entry points used by handle() and by the CLI driver.
    json post_warning(const std::string& body);
    json whatif(const std::string& warning_id, const WhatIfRequest& req) const;
    json get_assessment(const std::string& warning_id) const;
    json get_escalation(const std::string& warning_id) const;
    json issue_sos1(const std::string& warning_id, const std::string& approver);
    json record_pledge(const std::string& warning_id, const escalation::Pledge& pledge);
    json evaluate_sos2(const std::string& warning_id, const std::string& approver);
    json list_warnings() const;
    json olap_query(const std::multimap<std::string, std::string>& params) const;

private:
    void commit(CommandKind kind, json payload);
    json escalation_view(const escalation::EscalationState& s) const;
    json assessment_view(const Assessment& a) const;
    const escalation::EscalationState& escalation_for(const std::string& warning_id) const;
    void write_outbox(const escalation::EscalationState& s, const escalation::Event& e) const;
    Response route(const Request& request);

    ReferenceDataset ref_;
    std::vector<HistoricalQuake> catalog_;
    std::shared_ptr<EventStore> store_;
    ServiceOptions options_;
    ServiceState state_;
    mutable std::shared_mutex mutex_;
};

// Error -> HTTP status mapping used by handle().
int status_for(ErrorCode code);
json error_body(const std::exception& e);

} // namespace quakedss::service
