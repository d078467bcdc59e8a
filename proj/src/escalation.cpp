#include "quakedss/escalation.hpp"

#include "quakedss/error.hpp"
#include "quakedss/geo.hpp"

#include <algorithm>
#include <set>

namespace quakedss::escalation {

std::string_view to_string(Phase p) {
    switch (p) {
    case Phase::Received: return "Received";
    case Phase::Assessed: return "Assessed";
    case Phase::Sos1Issued: return "Sos1Issued";
    case Phase::Sos2Issued: return "Sos2Issued";
    case Phase::Resolved: return "Resolved";
    }
    return "?";
}

Phase parse_phase(std::string_view text) {
    for (auto p : {Phase::Received, Phase::Assessed, Phase::Sos1Issued, Phase::Sos2Issued, Phase::Resolved}) {
        if (to_string(p) == text) return p;
    }
    throw Error(ErrorCode::MalformedValue, "phase", std::string(text));
}

std::string_view event_kind(const Event& e) {
    struct Visitor {
        std::string_view operator()(const AssessedEvent&) const { return "assessed"; }
        std::string_view operator()(const Sos1Event&) const { return "sos1"; }
        std::string_view operator()(const PledgeEvent&) const { return "pledge"; }
        std::string_view operator()(const Sos2Event&) const { return "sos2"; }
        std::string_view operator()(const ResolvedEvent&) const { return "resolved"; }
    };
    return std::visit(Visitor{}, e);
}

std::int64_t EscalationState::pledged_by(const RegionCode& code) const {
    std::int64_t sum = 0;
    for (const auto& p : pledges) {
        if (p.source_region_code == code) sum += p.medics_pledged;
    }
    return sum;
}

namespace {

[[noreturn]] void illegal(const EscalationState& s, const Event& e, const std::string& why) {
    throw Error(ErrorCode::IllegalTransition, std::string(event_kind(e)),
                "in phase " + std::string(to_string(s.phase)) + " for " + s.warning_id + ": " + why);
}

} // namespace

EscalationState apply_event(const EscalationState& state, const Event& event) {
    EscalationState next = state;
    std::visit(
        [&](const auto& ev) {
            using T = std::decay_t<decltype(ev)>;
            if constexpr (std::is_same_v<T, AssessedEvent>) {
                if (state.phase != Phase::Received) illegal(state, event, "already assessed");
                if (ev.shortage < 0) illegal(state, event, "negative shortage");
                next.phase = Phase::Assessed;
                next.initial_shortage = ev.shortage;
                next.shortage = ev.shortage;
                next.assessed_at = ev.at;
            } else if constexpr (std::is_same_v<T, Sos1Event>) {
                if (state.phase != Phase::Assessed) illegal(state, event, "SOS-1 requires Assessed");
                if (state.shortage <= 0) illegal(state, event, "no shortage");
                if (ev.approver.empty()) illegal(state, event, "no approver");
                if (ev.amount != state.shortage) illegal(state, event, "amount differs from shortage");
                next.phase = Phase::Sos1Issued;
                next.sos1 = ev;
                next.approvals.push_back({"sos1", ev.approver, ev.at});
            } else if constexpr (std::is_same_v<T, PledgeEvent>) {
                const auto& p = ev.pledge;
                if (state.phase != Phase::Sos1Issued && state.phase != Phase::Sos2Issued) {
                    illegal(state, event, "pledges are accepted only after SOS-1");
                }
                if (p.medics_pledged < 1) illegal(state, event, "pledge below 1");
                if (p.source_region_code.empty()) illegal(state, event, "pledge without source");
                if (p.source_region_code == kInternational && state.phase != Phase::Sos2Issued) {
                    illegal(state, event, "international pledge before SOS-2");
                }
                next.pledges.push_back(p);
                next.shortage = std::max<std::int64_t>(0, state.shortage - p.medics_pledged);
            } else if constexpr (std::is_same_v<T, Sos2Event>) {
                if (state.phase != Phase::Sos1Issued) illegal(state, event, "SOS-2 requires Sos1Issued");
                if (state.shortage <= 0) illegal(state, event, "no remaining shortage");
                if (ev.approver.empty()) illegal(state, event, "no approver");
                if (ev.amount != state.shortage) illegal(state, event, "amount differs from shortage");
                next.phase = Phase::Sos2Issued;
                next.sos2 = ev;
                next.approvals.push_back({"sos2", ev.approver, ev.at});
            } else if constexpr (std::is_same_v<T, ResolvedEvent>) {
                if (state.phase == Phase::Received || state.phase == Phase::Resolved) {
                    illegal(state, event, "nothing to resolve");
                }
                if (state.shortage != 0) illegal(state, event, "shortage still open");
                if (ev.approver.empty()) illegal(state, event, "no approver");
                next.phase = Phase::Resolved;
                next.approvals.push_back({"resolve", ev.approver, ev.at});
            }
        },
        event);
    next.history.push_back(event);
    return next;
}

EscalationState replay(const std::string& warning_id, std::span<const Event> history) {
    EscalationState state;
    state.warning_id = warning_id;
    for (const auto& e : history) state = apply_event(state, e);
    return state;
}

AssessOutcome assess(const Warning& warning, const ReferenceDataset& ref, std::span<const HistoricalQuake> catalog,
                     Timestamp now) {
    AssessOutcome out{assess_warning(warning, ref, catalog), {}};
    out.state.warning_id = warning.id();
    out.state = apply_event(out.state, AssessedEvent{out.assessment.medics.shortage, now});
    return out;
}

std::vector<SourceCandidate> nearest_sources(std::span<const RegionCode> affected, const ReferenceDataset& ref) {
    std::vector<const Region*> area;
    std::set<RegionCode> affected_set;
    for (const auto& code : affected) {
        const Region* r = ref.find_regency(code);
        if (r == nullptr) throw Error(ErrorCode::UnknownRegency, code);
        if (affected_set.insert(code).second) area.push_back(r);
    }
    if (area.empty()) return {};

    double total = 0.0, lat = 0.0, lon = 0.0;
    for (const Region* r : area) total += static_cast<double>(r->population);
    for (const Region* r : area) {
        double w = total > 0.0 ? static_cast<double>(r->population) / total : 1.0 / static_cast<double>(area.size());
        lat += w * r->centroid_lat;
        lon += w * r->centroid_lon;
    }

    std::vector<SourceCandidate> out;
    for (const auto& r : ref.regencies()) {
        if (r.medics_pledgeable <= 0 || affected_set.count(r.code)) continue;
        out.push_back({r.code, r.name, r.medics_pledgeable,
                       geo::haversine_km(lat, lon, r.centroid_lat, r.centroid_lon)});
    }
    std::sort(out.begin(), out.end(), [](const SourceCandidate& a, const SourceCandidate& b) {
        if (a.distance_km != b.distance_km) return a.distance_km < b.distance_km;
        return a.code < b.code;
    });
    return out;
}

namespace {

void require_approver(const std::string& approver) {
    if (approver.empty()) throw Error(ErrorCode::MissingApprover, "approver");
}

[[noreturn]] void not_eligible(const EscalationState& s, const std::string& action, const std::string& why) {
    throw Error(ErrorCode::NotEligible, action, s.warning_id + " in phase " + std::string(to_string(s.phase)) + ": " + why);
}

} // namespace

EscalationState issue_sos1(const EscalationState& state, const std::string& approver,
                           std::vector<SourceCandidate> sources, Timestamp now) {
    require_approver(approver);
    if (state.phase != Phase::Assessed) not_eligible(state, "sos1", "wrong phase");
    if (state.shortage <= 0) not_eligible(state, "sos1", "no medic shortage");
    return apply_event(state, Sos1Event{approver, state.shortage, std::move(sources), now});
}

EscalationState record_pledge(const EscalationState& state, const Pledge& pledge, const ReferenceDataset& ref) {
    if (pledge.medics_pledged < 1) {
        throw Error(ErrorCode::InvalidPledge, "medics_pledged", std::to_string(pledge.medics_pledged) + " < 1");
    }
    if (state.phase != Phase::Sos1Issued && state.phase != Phase::Sos2Issued) {
        not_eligible(state, "pledge", "no SOS has been issued");
    }
    if (pledge.source_region_code == kInternational) {
        if (state.phase != Phase::Sos2Issued) not_eligible(state, "pledge", "international help needs SOS-2");
    } else {
        const Region* r = ref.find_regency(pledge.source_region_code);
        if (r == nullptr) throw Error(ErrorCode::InvalidSource, pledge.source_region_code, "unknown region");
        auto cumulative = state.pledged_by(r->code) + pledge.medics_pledged;
        if (cumulative > r->medics_pledgeable) {
            throw Error(ErrorCode::InvalidSource, r->code,
                        std::to_string(cumulative) + " exceeds pledgeable " + std::to_string(r->medics_pledgeable));
        }
    }
    return apply_event(state, PledgeEvent{pledge});
}

EscalationState evaluate_sos2(const EscalationState& state, const std::string& approver, Timestamp now) {
    require_approver(approver);
    if (state.phase != Phase::Sos1Issued) not_eligible(state, "sos2", "SOS-2 requires an issued SOS-1");
    if (state.shortage == 0) return apply_event(state, ResolvedEvent{approver, now});
    return apply_event(state, Sos2Event{approver, state.shortage, now});
}

EscalationState resolve(const EscalationState& state, const std::string& approver, Timestamp now) {
    require_approver(approver);
    if (state.phase == Phase::Received || state.phase == Phase::Resolved) not_eligible(state, "resolve", "wrong phase");
    if (state.shortage != 0) not_eligible(state, "resolve", "shortage still open");
    return apply_event(state, ResolvedEvent{approver, now});
}

bool sos1_pending(const EscalationState& state) {
    return state.phase == Phase::Assessed && state.shortage > 0;
}

bool is_overdue(const EscalationState& state, Timestamp now, std::chrono::minutes sla) {
    return sos1_pending(state) && state.assessed_at && now - *state.assessed_at > sla;
}

std::optional<SosRequest> sos_request_for(const EscalationState& state, const Event& event) {
    if (const auto* s1 = std::get_if<Sos1Event>(&event)) {
        return SosRequest{state.warning_id, 1, s1->amount, s1->sources, s1->at};
    }
    if (const auto* s2 = std::get_if<Sos2Event>(&event)) {
        return SosRequest{state.warning_id, 2, s2->amount, {}, s2->at};
    }
    return std::nullopt;
}

} // namespace quakedss::escalation
