#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bb84mc {

struct SourcePos {
    int line = 0;
    int column = 0;

    bool known() const { return line > 0; }
};

enum class ErrorKind {
    Syntax,
    DuplicateDeclaration,
    UnknownIdentifier,
    Type,
    ProbSum,
    ProbRange,
    OverlappingGuards,
    Bounds,
    DuplicateAssignment,
    ForeignAssignment,
    Nondeterminism,
    UnknownLabel,
    NoConvergence,
    InvalidParameter,
};

inline std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Syntax: return "SYNTAX";
        case ErrorKind::DuplicateDeclaration: return "DUPLICATE_DECLARATION";
        case ErrorKind::UnknownIdentifier: return "UNKNOWN_IDENTIFIER";
        case ErrorKind::Type: return "TYPE";
        case ErrorKind::ProbSum: return "PROB_SUM";
        case ErrorKind::ProbRange: return "PROB_RANGE";
        case ErrorKind::OverlappingGuards: return "OVERLAPPING_GUARDS";
        case ErrorKind::Bounds: return "BOUNDS";
        case ErrorKind::DuplicateAssignment: return "DUPLICATE_ASSIGNMENT";
        case ErrorKind::ForeignAssignment: return "FOREIGN_ASSIGNMENT";
        case ErrorKind::Nondeterminism: return "NONDETERMINISM";
        case ErrorKind::UnknownLabel: return "UNKNOWN_LABEL";
        case ErrorKind::NoConvergence: return "NO_CONVERGENCE";
        case ErrorKind::InvalidParameter: return "INVALID_PARAMETER";
    }
    return "UNKNOWN";
}

/// Every failure raised by the library. what() renders as
/// `line:col: KIND: detail` when a source position is known.
class ModelError : public std::runtime_error {
public:
    ModelError(ErrorKind kind, SourcePos pos, const std::string& detail)
        : std::runtime_error(render(kind, pos, detail)), kind_(kind), pos_(pos), detail_(detail) {}

    ModelError(ErrorKind kind, const std::string& detail) : ModelError(kind, SourcePos{}, detail) {}

    ErrorKind kind() const { return kind_; }
    SourcePos pos() const { return pos_; }
    const std::string& detail() const { return detail_; }

private:
    static std::string render(ErrorKind kind, SourcePos pos, const std::string& detail) {
        std::string out;
        if (pos.known()) {
            out += std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": ";
        }
        out += to_string(kind);
        out += ": ";
        out += detail;
        return out;
    }

    ErrorKind kind_;
    SourcePos pos_;
    std::string detail_;
};

}  // namespace bb84mc
