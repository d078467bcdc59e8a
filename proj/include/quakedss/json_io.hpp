#pragma once

#include "quakedss/escalation.hpp"
#include "quakedss/estimator.hpp"
#include "quakedss/model.hpp"
#include "quakedss/reference.hpp"
#include "quakedss/warehouse.hpp"

#include <json.hpp>

#include <cstdint>
#include <string_view>

// nlohmann::json bindings for the domain types. Field names mirror the
// struct members; timestamps are ISO 8601 UTC strings.

namespace quakedss {

using json = nlohmann::json;

void to_json(json& j, const QuakeEvent& e);
void from_json(const json& j, QuakeEvent& e);
void to_json(json& j, const Warning& w);
void from_json(const json& j, Warning& w);
void to_json(json& j, const Region& r);
void from_json(const json& j, Region& r);
void to_json(json& j, const HistoricalQuake& h);
void from_json(const json& j, HistoricalQuake& h);
void to_json(json& j, const MagnitudeBand& b);
void from_json(const json& j, MagnitudeBand& b);
void to_json(json& j, const CustomLineItem& c);
void from_json(const json& j, CustomLineItem& c);
void to_json(json& j, const ResourceCoefficients& c);
void from_json(const json& j, ResourceCoefficients& c);
void to_json(json& j, const EngineConfig& c);
void from_json(const json& j, EngineConfig& c);

void to_json(json& j, const EstimationInputs& v);
void from_json(const json& j, EstimationInputs& v);
void to_json(json& j, const MedicAssessment& v);
void from_json(const json& j, MedicAssessment& v);
void to_json(json& j, const AffectedArea& v);
void from_json(const json& j, AffectedArea& v);
void to_json(json& j, const AnalogWeight& v);
void from_json(const json& j, AnalogWeight& v);
void to_json(json& j, const CasualtyPrediction& v);
void from_json(const json& j, CasualtyPrediction& v);
void to_json(json& j, const CustomLineQuantity& v);
void from_json(const json& j, CustomLineQuantity& v);
void to_json(json& j, const ResourceChecklist& v);
void from_json(const json& j, ResourceChecklist& v);
void to_json(json& j, const Assessment& v);
void from_json(const json& j, Assessment& v);

json timestamp_json(Timestamp ts);
Timestamp timestamp_from(const json& j);

// 64-bit FNV-1a over the compact dump; keys are sorted so equal values hash equally.
std::uint64_t content_hash(const json& j);
std::string hex64(std::uint64_t v);

} // namespace quakedss

namespace quakedss::warehouse {

void to_json(json& j, const FactRow& r);
void from_json(const json& j, FactRow& r);
void to_json(json& j, const SourceRow& r);
void from_json(const json& j, SourceRow& r);
void to_json(json& j, const ExtractionBatch& b);
void from_json(const json& j, ExtractionBatch& b);
void to_json(json& j, const Measures& m);
void to_json(json& j, const FactStore& s);

} // namespace quakedss::warehouse

namespace quakedss::escalation {

void to_json(json& j, const Pledge& p);
void from_json(const json& j, Pledge& p);
void to_json(json& j, const SourceCandidate& c);
void from_json(const json& j, SourceCandidate& c);
void to_json(json& j, const Event& e);
void from_json(const json& j, Event& e);
void to_json(json& j, const Approval& a);
void to_json(json& j, const EscalationState& s);
void to_json(json& j, const SosRequest& r);

} // namespace quakedss::escalation
