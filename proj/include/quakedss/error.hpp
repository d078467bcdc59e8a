#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace quakedss {

enum class ErrorCode {
    OutOfRange,
    MissingField,
    MalformedTimestamp,
    MalformedValue,
    OrphanRegency,
    DuplicateCode,
    BadHeader,
    UnreadableSource,
    InvalidStandard,
    InvalidCoefficient,
    UnknownRegency,
    EmptyCatalog,
    ConflictingDimension,
    UnknownDimension,
    UnknownLevel,
    UnknownMember,
    AlreadyCoarsest,
    AlreadyFinest,
    NotEligible,
    InvalidSource,
    InvalidPledge,
    MissingApprover,
    IllegalTransition,
    UnknownWarning,
    DuplicateWarning,
    CorruptLog,
    Unauthorized,
};

std::string_view to_string(ErrorCode code);

/**
 * Error - domain failure carrying a machine-readable code and the
 * offending subject (field name, region code, sequence number, ...).
 */
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string subject, const std::string& detail = {});

    ErrorCode code() const noexcept { return code_; }
    const std::string& subject() const noexcept { return subject_; }

private:
    ErrorCode code_;
    std::string subject_;
};

// Field-level violation found while validating a record.
struct Violation {
    ErrorCode code;
    std::string field;
    std::string detail;

    bool operator==(const Violation&) const = default;
};

std::string describe(const Violation& v);

/**
 * ValidationError - one or more field-level violations for a single record.
 */
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<Violation> violations);

    const std::vector<Violation>& violations() const noexcept { return violations_; }

private:
    std::vector<Violation> violations_;
};

} // namespace quakedss
