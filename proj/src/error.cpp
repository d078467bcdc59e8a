#include "quakedss/error.hpp"

namespace quakedss {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::MalformedTimestamp: return "MalformedTimestamp";
    case ErrorCode::MalformedValue: return "MalformedValue";
    case ErrorCode::OrphanRegency: return "OrphanRegency";
    case ErrorCode::DuplicateCode: return "DuplicateCode";
    case ErrorCode::BadHeader: return "BadHeader";
    case ErrorCode::UnreadableSource: return "UnreadableSource";
    case ErrorCode::InvalidStandard: return "InvalidStandard";
    case ErrorCode::InvalidCoefficient: return "InvalidCoefficient";
    case ErrorCode::UnknownRegency: return "UnknownRegency";
    case ErrorCode::EmptyCatalog: return "EmptyCatalog";
    case ErrorCode::ConflictingDimension: return "ConflictingDimension";
    case ErrorCode::UnknownDimension: return "UnknownDimension";
    case ErrorCode::UnknownLevel: return "UnknownLevel";
    case ErrorCode::UnknownMember: return "UnknownMember";
    case ErrorCode::AlreadyCoarsest: return "AlreadyCoarsest";
    case ErrorCode::AlreadyFinest: return "AlreadyFinest";
    case ErrorCode::NotEligible: return "NotEligible";
    case ErrorCode::InvalidSource: return "InvalidSource";
    case ErrorCode::InvalidPledge: return "InvalidPledge";
    case ErrorCode::MissingApprover: return "MissingApprover";
    case ErrorCode::IllegalTransition: return "IllegalTransition";
    case ErrorCode::UnknownWarning: return "UnknownWarning";
    case ErrorCode::DuplicateWarning: return "DuplicateWarning";
    case ErrorCode::CorruptLog: return "CorruptLog";
    case ErrorCode::Unauthorized: return "Unauthorized";
    }
    return "Unknown";
}

namespace {

std::string format_message(ErrorCode code, const std::string& subject, const std::string& detail) {
    std::string msg(to_string(code));
    if (!subject.empty()) msg += "(" + subject + ")";
    if (!detail.empty()) msg += ": " + detail;
    return msg;
}

std::string join_violations(const std::vector<Violation>& vs) {
    std::string out;
    for (const auto& v : vs) {
        if (!out.empty()) out += "; ";
        out += describe(v);
    }
    return out;
}

} // namespace

Error::Error(ErrorCode code, std::string subject, const std::string& detail)
    : std::runtime_error(format_message(code, subject, detail)), code_(code), subject_(std::move(subject)) {}

std::string describe(const Violation& v) {
    return format_message(v.code, v.field, v.detail);
}

ValidationError::ValidationError(std::vector<Violation> violations)
    : Error(violations.empty() ? ErrorCode::MalformedValue : violations.front().code,
            violations.empty() ? std::string{} : violations.front().field,
            violations.size() > 1 ? join_violations(violations)
                                  : (violations.empty() ? std::string{} : violations.front().detail)),
      violations_(std::move(violations)) {}

} // namespace quakedss
