#include "quakedss/service.hpp"

#include "quakedss/error.hpp"
#include "quakedss/ingest.hpp"
#include "quakedss/olap_query.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>

namespace quakedss::service {

namespace esc = quakedss::escalation;
namespace wh = quakedss::warehouse;

json ServiceState::to_json() const {
    json esc_json = json::object();
    for (const auto& [id, s] : escalations) esc_json[id] = s;
    json warnings_json = json::object();
    for (const auto& [id, w] : warnings) warnings_json[id] = w;
    json assessments_json = json::object();
    for (const auto& [id, a] : assessments) assessments_json[id] = a;
    return json{{"warnings", std::move(warnings_json)},
                {"assessments", std::move(assessments_json)},
                {"escalations", std::move(esc_json)},
                {"warehouse", warehouse},
                {"last_sequence", last_sequence}};
}

std::uint64_t ServiceState::hash() const { return content_hash(to_json()); }

namespace {

esc::EscalationState& escalation_of(ServiceState& state, const std::string& id) {
    auto it = state.escalations.find(id);
    if (it == state.escalations.end()) throw Error(ErrorCode::UnknownWarning, id);
    return it->second;
}

} // namespace

void apply(ServiceState& state, const CommandEvent& event) {
    if (event.sequence != state.last_sequence + 1) {
        throw Error(ErrorCode::CorruptLog, std::to_string(state.last_sequence + 1),
                    "found sequence " + std::to_string(event.sequence));
    }
    const json& p = event.payload;
    switch (event.kind) {
    case CommandKind::WarningIngested: {
        auto w = p.at("warning").get<Warning>();
        if (state.warnings.count(w.id())) throw Error(ErrorCode::DuplicateWarning, w.id());
        esc::EscalationState s;
        s.warning_id = w.id();
        state.escalations[w.id()] = std::move(s);
        state.warnings.emplace(w.id(), std::move(w));
        break;
    }
    case CommandKind::Assessed: {
        auto id = p.at("warning_id").get<std::string>();
        auto a = p.at("assessment").get<Assessment>();
        auto& s = escalation_of(state, id);
        s = esc::apply_event(s, esc::AssessedEvent{a.medics.shortage, timestamp_from(p.at("at"))});
        state.assessments[id] = std::move(a);
        break;
    }
    case CommandKind::Sos1:
    case CommandKind::Pledge:
    case CommandKind::Sos2:
    case CommandKind::Resolved: {
        auto id = p.at("warning_id").get<std::string>();
        auto e = p.at("event").get<esc::Event>();
        if (esc::event_kind(e) != to_string(event.kind)) {
            throw Error(ErrorCode::IllegalTransition, std::string(esc::event_kind(e)), "payload kind mismatch");
        }
        auto& s = escalation_of(state, id);
        s = esc::apply_event(s, e);
        break;
    }
    case CommandKind::EtlBatch:
        state.warehouse.load_facts(p.at("batch").get<wh::ExtractionBatch>());
        break;
    }
    state.last_sequence = event.sequence;
}

ServiceState replay_log(std::span<const CommandEvent> log, const ReferenceDataset& ref) {
    ServiceState state;
    state.warehouse = wh::FactStore(wh::Schema::from_reference(ref));
    for (const auto& ev : log) {
        try {
            apply(state, ev);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::CorruptLog) throw;
            throw Error(ErrorCode::CorruptLog, std::to_string(ev.sequence), e.what());
        } catch (const std::exception& e) {
            throw Error(ErrorCode::CorruptLog, std::to_string(ev.sequence), e.what());
        }
    }
    return state;
}

Timestamp system_clock_now() {
    return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
}

WhatIfRequest parse_whatif(const json& body) {
    WhatIfRequest req;
    if (body.is_null()) return req;
    if (!body.is_object()) throw Error(ErrorCode::MalformedValue, "body", "expected an object");
    try {
        if (body.contains("W")) req.affected_population = body.at("W").get<std::int64_t>();
        if (body.contains("Sn")) req.standard = body.at("Sn").get<std::int64_t>();
        if (body.contains("magnitude")) req.magnitude = body.at("magnitude").get<double>();
        if (body.contains("affected_regencies")) {
            req.affected_regencies = body.at("affected_regencies").get<std::vector<RegionCode>>();
        }
        if (body.contains("coefficient_deltas")) {
            req.coefficient_deltas = body.at("coefficient_deltas").get<std::map<std::string, double>>();
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedValue, "whatif", e.what());
    }
    if (req.affected_population && *req.affected_population < 0) {
        throw Error(ErrorCode::OutOfRange, "W", "negative population");
    }
    if (req.standard && *req.standard < 1) throw Error(ErrorCode::InvalidStandard, "Sn", "must be >= 1");
    if (req.magnitude && !(*req.magnitude >= 0.0 && *req.magnitude <= 10.0)) {
        throw Error(ErrorCode::OutOfRange, "magnitude", format_number(*req.magnitude));
    }
    return req;
}

Service::Service(ReferenceDataset ref, std::vector<HistoricalQuake> catalog, std::shared_ptr<EventStore> store,
                 ServiceOptions options)
    : ref_(std::move(ref)), catalog_(std::move(catalog)), store_(std::move(store)), options_(std::move(options)) {
    if (!options_.clock) options_.clock = system_clock_now;
    auto log = store_->read_all();
    state_ = replay_log(log, ref_);
}

std::uint64_t Service::sequence() const {
    std::shared_lock lock(mutex_);
    return state_.last_sequence;
}

std::uint64_t Service::state_hash() const {
    std::shared_lock lock(mutex_);
    return state_.hash();
}

ServiceState Service::snapshot() const {
    std::shared_lock lock(mutex_);
    return state_;
}

void Service::set_catalog(std::vector<HistoricalQuake> catalog) {
    std::unique_lock lock(mutex_);
    catalog_ = std::move(catalog);
}

void Service::commit(CommandKind kind, json payload) {
    CommandEvent ev{state_.last_sequence + 1, kind, std::move(payload), options_.clock()};
    store_->append(ev);
    if (options_.after_append) options_.after_append(ev);
    apply(state_, ev);
}

std::size_t Service::refresh_warehouse() {
    std::unique_lock lock(mutex_);
    auto rows = wh::source_rows_from_catalog(catalog_, ref_);
    auto batch = wh::extract_deferred(rows, state_.warehouse.watermark(kCatalogSource));
    if (batch.rows.empty()) return 0;
    // Validate against a copy first so a bad batch never reaches the log.
    auto probe = state_.warehouse;
    probe.load_facts(batch);
    auto n = batch.rows.size();
    commit(CommandKind::EtlBatch, json{{"batch", std::move(batch)}});
    return n;
}

const esc::EscalationState& Service::escalation_for(const std::string& warning_id) const {
    auto it = state_.escalations.find(warning_id);
    if (it == state_.escalations.end()) throw Error(ErrorCode::UnknownWarning, warning_id);
    return it->second;
}

json Service::assessment_view(const Assessment& a) const {
    json j = a;
    auto it = state_.escalations.find(a.warning_id);
    if (it != state_.escalations.end() && it->second.sos2) {
        j["checklist"]["medics_international"] = it->second.sos2->amount;
    }
    return j;
}

json Service::escalation_view(const esc::EscalationState& s) const {
    json j = s;
    auto now = options_.clock();
    j["sos1_pending"] = esc::sos1_pending(s);
    j["overdue"] = esc::is_overdue(s, now, std::chrono::minutes(ref_.config().sos_sla_minutes));
    j["sla_minutes"] = ref_.config().sos_sla_minutes;
    if (s.assessed_at) j["elapsed_seconds"] = (now - *s.assessed_at).count();
    json candidates = json::array();
    auto a = state_.assessments.find(s.warning_id);
    if (a != state_.assessments.end()) {
        for (const auto& c : esc::nearest_sources(a->second.area.regencies, ref_)) {
            json cj = c;
            cj["remaining_pledgeable"] = c.medics_pledgeable - s.pledged_by(c.code);
            candidates.push_back(std::move(cj));
        }
    }
    j["candidates"] = std::move(candidates);
    return j;
}

void Service::write_outbox(const esc::EscalationState& s, const esc::Event& e) const {
    if (!options_.outbox_dir) return;
    auto req = esc::sos_request_for(s, e);
    if (!req) return;
    std::filesystem::create_directories(*options_.outbox_dir);
    std::string name = s.warning_id;
    std::replace(name.begin(), name.end(), '/', '_');
    std::ofstream out(*options_.outbox_dir / (name + "-sos" + std::to_string(req->stage) + ".json"));
    out << json(*req).dump() << '\n';
}

json Service::post_warning(const std::string& body) {
    auto warning = ingest::parse_warning_record(body);
    std::unique_lock lock(mutex_);
    if (state_.warnings.count(warning.id())) throw Error(ErrorCode::DuplicateWarning, warning.id());
    auto now = options_.clock();
    // Assess before logging anything so an estimator error leaves no trace.
    auto outcome = esc::assess(warning, ref_, catalog_, now);
    auto id = warning.id();
    commit(CommandKind::WarningIngested, json{{"warning", std::move(warning)}});
    commit(CommandKind::Assessed, json{{"warning_id", id}, {"assessment", outcome.assessment}, {"at", timestamp_json(now)}});
    if (outcome.assessment.medics.shortage == 0) {
        auto next = esc::resolve(state_.escalations.at(id), kAutoApprover, now);
        commit(CommandKind::Resolved, json{{"warning_id", id}, {"event", next.history.back()}});
    }
    const auto& s = state_.escalations.at(id);
    return json{{"warning_id", id},
                {"assessment", assessment_view(state_.assessments.at(id))},
                {"escalation", escalation_view(s)},
                {"phase", std::string(esc::to_string(s.phase))},
                {"sos1_pending", esc::sos1_pending(s)}};
}

json Service::whatif(const std::string& warning_id, const WhatIfRequest& req) const {
    std::shared_lock lock(mutex_);
    auto it = state_.warnings.find(warning_id);
    if (it == state_.warnings.end()) throw Error(ErrorCode::UnknownWarning, warning_id);
    Warning w = it->second;
    if (req.affected_regencies) w.event.affected_regencies = *req.affected_regencies;
    if (req.magnitude) w.event.magnitude = *req.magnitude;

    auto config = ref_.config();
    if (!req.coefficient_deltas.empty()) {
        json coeffs = config.coefficients;
        for (const auto& [name, delta] : req.coefficient_deltas) {
            if (!coeffs.contains(name) || !coeffs[name].is_number()) {
                throw Error(ErrorCode::InvalidCoefficient, name, "not a numeric coefficient");
            }
            if (coeffs[name].is_number_integer()) {
                coeffs[name] = coeffs[name].get<std::int64_t>() + static_cast<std::int64_t>(delta);
            } else {
                coeffs[name] = coeffs[name].get<double>() + delta;
            }
        }
        config.coefficients = coeffs.get<ResourceCoefficients>();
        validate_coefficients(config.coefficients);
    }
    auto area = affected_population(w, ref_);
    if (req.affected_population) area.population = *req.affected_population;
    auto sn = req.standard.value_or(ref_.sn());
    auto a = assess_with(warning_id, w.event.magnitude, area, sn, config, catalog_);
    return json{{"warning_id", warning_id}, {"assessment", assessment_view(a)}, {"non_binding", true}};
}

json Service::get_assessment(const std::string& warning_id) const {
    std::shared_lock lock(mutex_);
    auto it = state_.assessments.find(warning_id);
    if (it == state_.assessments.end()) throw Error(ErrorCode::UnknownWarning, warning_id);
    return json{{"warning_id", warning_id}, {"assessment", assessment_view(it->second)}};
}

json Service::get_escalation(const std::string& warning_id) const {
    std::shared_lock lock(mutex_);
    return escalation_view(escalation_for(warning_id));
}

json Service::issue_sos1(const std::string& warning_id, const std::string& approver) {
    std::unique_lock lock(mutex_);
    const auto& s = escalation_for(warning_id);
    std::vector<esc::SourceCandidate> sources;
    if (auto a = state_.assessments.find(warning_id); a != state_.assessments.end()) {
        sources = esc::nearest_sources(a->second.area.regencies, ref_);
    }
    auto next = esc::issue_sos1(s, approver, std::move(sources), options_.clock());
    commit(CommandKind::Sos1, json{{"warning_id", warning_id}, {"event", next.history.back()}});
    const auto& now_state = state_.escalations.at(warning_id);
    write_outbox(now_state, now_state.history.back());
    return escalation_view(now_state);
}

json Service::record_pledge(const std::string& warning_id, const esc::Pledge& pledge) {
    std::unique_lock lock(mutex_);
    const auto& s = escalation_for(warning_id);
    auto next = esc::record_pledge(s, pledge, ref_);
    commit(CommandKind::Pledge, json{{"warning_id", warning_id}, {"event", next.history.back()}});
    const auto& after = state_.escalations.at(warning_id);
    if (after.phase == esc::Phase::Sos2Issued && after.shortage == 0) {
        auto resolved = esc::resolve(after, kAutoApprover, options_.clock());
        commit(CommandKind::Resolved, json{{"warning_id", warning_id}, {"event", resolved.history.back()}});
    }
    return escalation_view(state_.escalations.at(warning_id));
}

json Service::evaluate_sos2(const std::string& warning_id, const std::string& approver) {
    std::unique_lock lock(mutex_);
    const auto& s = escalation_for(warning_id);
    auto next = esc::evaluate_sos2(s, approver, options_.clock());
    const auto& ev = next.history.back();
    auto kind = std::holds_alternative<esc::Sos2Event>(ev) ? CommandKind::Sos2 : CommandKind::Resolved;
    commit(kind, json{{"warning_id", warning_id}, {"event", ev}});
    const auto& now_state = state_.escalations.at(warning_id);
    write_outbox(now_state, now_state.history.back());
    return escalation_view(now_state);
}

json Service::list_warnings() const {
    std::shared_lock lock(mutex_);
    std::vector<const Warning*> ws;
    for (const auto& [id, w] : state_.warnings) ws.push_back(&w);
    std::sort(ws.begin(), ws.end(), [](const Warning* a, const Warning* b) {
        if (a->issued_at != b->issued_at) return a->issued_at > b->issued_at;
        return a->id() < b->id();
    });
    auto now = options_.clock();
    auto sla = std::chrono::minutes(ref_.config().sos_sla_minutes);
    json items = json::array();
    for (const Warning* w : ws) {
        const auto& s = state_.escalations.at(w->id());
        items.push_back(json{{"id", w->id()},
                             {"issued_at", timestamp_json(w->issued_at)},
                             {"magnitude", w->event.magnitude},
                             {"epicenter_desc", w->event.epicenter_desc},
                             {"phase", std::string(esc::to_string(s.phase))},
                             {"shortage", s.shortage},
                             {"sos1_pending", esc::sos1_pending(s)},
                             {"overdue", esc::is_overdue(s, now, sla)}});
    }
    return json{{"items", std::move(items)}};
}

json Service::olap_query(const std::multimap<std::string, std::string>& params) const {
    wh::OlapQuery q;
    for (auto [it, end] = params.equal_range("group_by"); it != end; ++it) {
        auto axes = wh::parse_group_by(it->second);
        q.axes.insert(q.axes.end(), axes.begin(), axes.end());
    }
    for (auto [it, end] = params.equal_range("filter"); it != end; ++it) q.filters.push_back(wh::parse_filter(it->second));
    for (auto [it, end] = params.equal_range("op"); it != end; ++it) q.ops.push_back(wh::parse_op(it->second));

    std::shared_lock lock(mutex_);
    auto table = wh::to_table(wh::run_query(state_.warehouse, q));
    json rows = json::array();
    for (const auto& [coord, m] : table.rows) {
        rows.push_back(json{{"coordinate", coord},
                            {"deaths", m.deaths},
                            {"injured", m.injured},
                            {"buildings_destroyed", m.buildings_destroyed},
                            {"event_count", m.event_count}});
    }
    return json{{"columns", table.columns}, {"rows", std::move(rows)}};
}

int status_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::UnknownWarning: return 404;
    case ErrorCode::DuplicateWarning:
    case ErrorCode::NotEligible:
    case ErrorCode::IllegalTransition: return 409;
    case ErrorCode::UnknownRegency:
    case ErrorCode::InvalidSource:
    case ErrorCode::ConflictingDimension:
    case ErrorCode::EmptyCatalog: return 422;
    case ErrorCode::Unauthorized: return 401;
    case ErrorCode::CorruptLog:
    case ErrorCode::UnreadableSource: return 500;
    default: return 400;
    }
}

json error_body(const std::exception& e) {
    json j{{"message", e.what()}};
    if (const auto* err = dynamic_cast<const Error*>(&e)) {
        j["error"] = std::string(to_string(err->code()));
        j["subject"] = err->subject();
    } else {
        j["error"] = "BadRequest";
    }
    if (const auto* v = dynamic_cast<const ValidationError*>(&e)) {
        json vs = json::array();
        for (const auto& x : v->violations()) {
            vs.push_back(json{{"code", std::string(to_string(x.code))}, {"field", x.field}, {"detail", x.detail}});
        }
        j["violations"] = std::move(vs);
    }
    return j;
}

namespace {

std::vector<std::string> path_segments(const std::string& path) {
    std::vector<std::string> out;
    for (auto& s : split(path, '/')) {
        if (!s.empty()) out.push_back(std::move(s));
    }
    return out;
}

json parse_body(const std::string& body) {
    if (trim(body).empty()) return json::object();
    try {
        return json::parse(body);
    } catch (const json::exception&) {
        throw Error(ErrorCode::MalformedValue, "body", "not a JSON object");
    }
}

std::string approver_from(const json& body) {
    auto a = body.value("approver", std::string{});
    if (trim(a).empty()) throw Error(ErrorCode::MissingApprover, "approver");
    return trim(a);
}

} // namespace

Response Service::route(const Request& req) {
    auto seg = path_segments(req.path);
    const bool get = req.method == "GET";
    const bool post = req.method == "POST";
    auto require_write = [&] {
        if (!options_.write_token.empty() && req.token != options_.write_token) {
            throw Error(ErrorCode::Unauthorized, "token", "write requires a valid token");
        }
    };

    if (get && seg == std::vector<std::string>{"healthz"}) return {200, json{{"status", "ok"}}};
    if (seg.size() == 1 && seg[0] == "warnings") {
        if (get) return {200, list_warnings()};
        if (post) {
            require_write();
            return {201, post_warning(req.body)};
        }
    }
    if (get && seg.size() == 1 && seg[0] == "historical") {
        std::shared_lock lock(mutex_);
        return {200, json{{"items", catalog_}}};
    }
    if (get && seg.size() == 1 && seg[0] == "regions") {
        return {200, json{{"provinces", ref_.provinces()}, {"regencies", ref_.regencies()}, {"sn", ref_.sn()}}};
    }
    if (get && seg.size() == 2 && seg[0] == "olap" && seg[1] == "query") return {200, olap_query(req.query)};
    if (seg.size() >= 2 && seg[0] == "assessments") {
        if (get && seg.size() == 2) return {200, get_assessment(seg[1])};
        if (post && seg.size() == 3 && seg[2] == "whatif") return {200, whatif(seg[1], parse_whatif(parse_body(req.body)))};
    }
    if (seg.size() >= 2 && seg[0] == "escalations") {
        if (get && seg.size() == 2) return {200, get_escalation(seg[1])};
        if (post && seg.size() == 3) {
            require_write();
            auto body = parse_body(req.body);
            if (seg[2] == "sos1") return {200, issue_sos1(seg[1], approver_from(body))};
            if (seg[2] == "sos2") return {200, evaluate_sos2(seg[1], approver_from(body))};
            if (seg[2] == "pledges") {
                esc::Pledge p;
                try {
                    p.source_region_code = body.at("source_region_code").get<std::string>();
                    p.medics_pledged = body.at("medics_pledged").get<std::int64_t>();
                } catch (const json::exception& e) {
                    throw Error(ErrorCode::MissingField, "pledge", e.what());
                }
                p.recorded_at = body.contains("recorded_at") ? timestamp_from(body.at("recorded_at")) : options_.clock();
                return {201, record_pledge(seg[1], p)};
            }
        }
    }
    return {404, json{{"error", "NotFound"}, {"message", req.method + " " + req.path}}};
}

Response Service::handle(const Request& request) {
    Response res;
    try {
        res = route(request);
    } catch (const Error& e) {
        res = {status_for(e.code()), error_body(e)};
    } catch (const json::exception& e) {
        res = {400, error_body(e)};
    }
    if (!res.body.is_object()) res.body = json{{"items", res.body}};
    res.body["log_seq"] = sequence();
    return res;
}

} // namespace quakedss::service
