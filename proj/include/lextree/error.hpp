#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lextree {

/// Stable error codes. The names returned by to_string() are part of the
/// scripting and HTTP contract and must not change.
enum class ErrorCode {
    SyntaxError,
    UnknownPredicate,
    UnknownConsequence,
    DuplicateId,
    NonExhaustiveBranches,
    DuplicateBranch,
    DomainMismatch,
    BadVersion,
    SchemaViolation,
    IncompleteAssignment,
    ConflictDetected,
    NoNorms,
    StateSpaceTooLarge,
    MissingFact,
    SessionFinished,
    NothingToUndo,
    ReplayMismatch,
    UnknownSession,
    VersionConflict,
    DocumentUnavailable,
    BadRequest,
    NotFound,
    MethodNotAllowed,
    UnsatisfiablePath,
    IoError,
};

std::string_view to_string(ErrorCode code);

struct SourceSpan {
    int line = 1;
    int column = 1;
    int length = 0;

    friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

/// Span attached to a parsed entity. Spans are diagnostic metadata only, so
/// two entities that differ only in where they were written compare equal.
struct SpanInfo {
    std::optional<SourceSpan> span;

    friend bool operator==(const SpanInfo&, const SpanInfo&) { return true; }
};

enum class Severity { Error, Warning };

struct Diagnostic {
    ErrorCode code;
    Severity severity = Severity::Error;
    std::string message;
    std::optional<SourceSpan> span;
};

/// `file:line:col: error[Code]: message`
std::string format_diagnostic(const Diagnostic& d, std::string_view file = {});

/// Domain failure raised by compile, evaluate, sessions and the service.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace lextree
