#pragma once

#include "quakedss/estimator.hpp"
#include "quakedss/reference.hpp"
#include "quakedss/time.hpp"

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace quakedss::escalation {

enum class Phase { Received, Assessed, Sos1Issued, Sos2Issued, Resolved };

std::string_view to_string(Phase p);
Phase parse_phase(std::string_view text);

inline const std::string kInternational = "INTERNATIONAL";

struct Pledge {
    std::string source_region_code; // a regency code or kInternational
    std::int64_t medics_pledged = 0;
    Timestamp recorded_at{};

    bool operator==(const Pledge&) const = default;
};

struct SourceCandidate {
    RegionCode code;
    std::string name;
    std::int64_t medics_pledgeable = 0;
    double distance_km = 0.0;

    bool operator==(const SourceCandidate&) const = default;
};

// Event payloads. Each is one transition of the workflow.
struct AssessedEvent {
    std::int64_t shortage = 0; // Ktk
    Timestamp at{};
    bool operator==(const AssessedEvent&) const = default;
};
struct Sos1Event {
    std::string approver;
    std::int64_t amount = 0;
    std::vector<SourceCandidate> sources;
    Timestamp at{};
    bool operator==(const Sos1Event&) const = default;
};
struct PledgeEvent {
    Pledge pledge;
    bool operator==(const PledgeEvent&) const = default;
};
struct Sos2Event {
    std::string approver;
    std::int64_t amount = 0;
    Timestamp at{};
    bool operator==(const Sos2Event&) const = default;
};
struct ResolvedEvent {
    std::string approver;
    Timestamp at{};
    bool operator==(const ResolvedEvent&) const = default;
};

using Event = std::variant<AssessedEvent, Sos1Event, PledgeEvent, Sos2Event, ResolvedEvent>;

std::string_view event_kind(const Event& e);

struct Approval {
    std::string action; // "sos1", "sos2" or "resolve"
    std::string approver;
    Timestamp at{};
    bool operator==(const Approval&) const = default;
};

/**
 * EscalationState - one warning's SOS workflow. Received -> Assessed ->
 * {Resolved | Sos1Issued} -> {Resolved | Sos2Issued} -> Resolved.
 * Every field is a fold over `history`.
 */
struct EscalationState {
    std::string warning_id;
    Phase phase = Phase::Received;
    std::int64_t initial_shortage = 0; // Ktk at assessment
    std::int64_t shortage = 0;         // Ktk minus accepted pledges, floored at 0
    std::vector<Pledge> pledges;
    std::vector<Approval> approvals;
    std::optional<Timestamp> assessed_at;
    std::optional<Sos1Event> sos1;
    std::optional<Sos2Event> sos2;
    std::vector<Event> history;

    std::int64_t pledged_by(const RegionCode& code) const;

    bool operator==(const EscalationState&) const = default;
};

// Deterministic fold step. Throws IllegalTransition on any event the current
// phase does not admit, leaving `state` untouched.
EscalationState apply_event(const EscalationState& state, const Event& event);

EscalationState replay(const std::string& warning_id, std::span<const Event> history);

// Runs the full estimate and opens the workflow at Assessed with shortage = Ktk.
struct AssessOutcome {
    Assessment assessment;
    EscalationState state;
};
AssessOutcome assess(const Warning& warning, const ReferenceDataset& ref, std::span<const HistoricalQuake> catalog,
                     Timestamp now);

// Non-affected regencies with pledgeable medics, nearest first from the
// population-weighted centroid of the affected area; ties by code.
std::vector<SourceCandidate> nearest_sources(std::span<const RegionCode> affected, const ReferenceDataset& ref);

// The workflow operations; each throws NotEligible (or MissingApprover)
// without changing anything when its guard fails.
EscalationState issue_sos1(const EscalationState& state, const std::string& approver,
                           std::vector<SourceCandidate> sources, Timestamp now);
EscalationState record_pledge(const EscalationState& state, const Pledge& pledge, const ReferenceDataset& ref);
// Sos1Issued: shortage > 0 -> Sos2Issued, shortage == 0 -> Resolved.
EscalationState evaluate_sos2(const EscalationState& state, const std::string& approver, Timestamp now);
// Closes an Assessed, Sos1Issued or Sos2Issued state whose shortage is 0.
EscalationState resolve(const EscalationState& state, const std::string& approver, Timestamp now);

bool sos1_pending(const EscalationState& state);
// Assessed with a shortage and no SOS-1 approval after the SLA window.
bool is_overdue(const EscalationState& state, Timestamp now, std::chrono::minutes sla);

// Outbound SOS request document.
struct SosRequest {
    std::string warning_id;
    int stage = 1;
    std::int64_t amount = 0;
    std::vector<SourceCandidate> sources; // empty for stage 2 (international)
    Timestamp issued_at{};

    bool operator==(const SosRequest&) const = default;
};

std::optional<SosRequest> sos_request_for(const EscalationState& state, const Event& event);

} // namespace quakedss::escalation
