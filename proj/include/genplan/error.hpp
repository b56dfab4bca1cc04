#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace genplan {

enum class ErrorCode {
    SyntaxError,
    UnsupportedFeature,
    ArityMismatch,
    UnknownObject,
    UnknownPredicate,
    UnknownType,
    DuplicateName,
    EmptyGoal,
    CapacityExceeded,
    Unsolvable,
    EmptyTrainingSplit,
    ShapeMismatch,
    DimensionMismatch,
    EmptyInput,
    NonFiniteInput,
    NonScalarRoot,
    MissingGradients,
    UnknownObjectInAtom,
    EmptySuccessorSet,
    NoNonGoalStates,
    WallClockExceeded,
    StuckState,
    NotExpanded,
    SignatureMismatch,
    FormatError,
    IoError,
    InvalidArgument,
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnsupportedFeature: return "UnsupportedFeature";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::UnknownObject: return "UnknownObject";
    case ErrorCode::UnknownPredicate: return "UnknownPredicate";
    case ErrorCode::UnknownType: return "UnknownType";
    case ErrorCode::DuplicateName: return "DuplicateName";
    case ErrorCode::EmptyGoal: return "EmptyGoal";
    case ErrorCode::CapacityExceeded: return "CapacityExceeded";
    case ErrorCode::Unsolvable: return "Unsolvable";
    case ErrorCode::EmptyTrainingSplit: return "EmptyTrainingSplit";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::NonScalarRoot: return "NonScalarRoot";
    case ErrorCode::MissingGradients: return "MissingGradients";
    case ErrorCode::UnknownObjectInAtom: return "UnknownObjectInAtom";
    case ErrorCode::EmptySuccessorSet: return "EmptySuccessorSet";
    case ErrorCode::NoNonGoalStates: return "NoNonGoalStates";
    case ErrorCode::WallClockExceeded: return "WallClockExceeded";
    case ErrorCode::StuckState: return "StuckState";
    case ErrorCode::NotExpanded: return "NotExpanded";
    case ErrorCode::SignatureMismatch: return "SignatureMismatch";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

/// Location inside a text input, 1-based. Zero line means "no location".
struct SourceLocation {
    std::size_t line = 0;
    std::size_t column = 0;
};

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, SourceLocation where = {})
        : std::runtime_error(format(code, message, where)), code_(code), where_(where) {}

    ErrorCode code() const noexcept { return code_; }
    SourceLocation where() const noexcept { return where_; }

private:
    static std::string format(ErrorCode code, const std::string& message, SourceLocation where) {
        std::string out(to_string(code));
        if (where.line > 0)
            out += " at " + std::to_string(where.line) + ":" + std::to_string(where.column);
        out += ": ";
        out += message;
        return out;
    }

    ErrorCode code_;
    SourceLocation where_;
};

} // namespace genplan
