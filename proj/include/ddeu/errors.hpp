#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ddeu {

enum class ErrorCode {
    InvalidKind,
    InvalidParameter,
    NotFiveRoots,
    NonFinite,
    OutOfRange,
    GridMismatch,
    ZeroSegment,
    NoDerivative,
    Range,
    EigFail,
    NoCrossing,
    TangentCrossing,
    EtaNotInY,
    NoConvergence,
    NotMinimal,
    WrongUnstableCount,
    DegenerateCurve,
    NotNested,
    MultiValued,
    InvalidConfig,
    Io,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidKind: return "INVALID_KIND";
        case ErrorCode::InvalidParameter: return "INVALID_PARAMETER";
        case ErrorCode::NotFiveRoots: return "NOT_FIVE_ROOTS";
        case ErrorCode::NonFinite: return "NON_FINITE";
        case ErrorCode::OutOfRange: return "OUT_OF_RANGE";
        case ErrorCode::GridMismatch: return "GRID_MISMATCH";
        case ErrorCode::ZeroSegment: return "ZERO_SEGMENT";
        case ErrorCode::NoDerivative: return "NO_DERIVATIVE";
        case ErrorCode::Range: return "RANGE";
        case ErrorCode::EigFail: return "EIG_FAIL";
        case ErrorCode::NoCrossing: return "NO_CROSSING";
        case ErrorCode::TangentCrossing: return "TANGENT_CROSSING";
        case ErrorCode::EtaNotInY: return "ETA_NOT_IN_Y";
        case ErrorCode::NoConvergence: return "NO_CONVERGENCE";
        case ErrorCode::NotMinimal: return "NOT_MINIMAL";
        case ErrorCode::WrongUnstableCount: return "WRONG_UNSTABLE_COUNT";
        case ErrorCode::DegenerateCurve: return "DEGENERATE_CURVE";
        case ErrorCode::NotNested: return "NOT_NESTED";
        case ErrorCode::MultiValued: return "MULTI_VALUED";
        case ErrorCode::InvalidConfig: return "INVALID_CONFIG";
        case ErrorCode::Io: return "IO";
    }
    return "UNKNOWN";
}

/// Every failure in the library is reported through this exception; `code()`
/// is the machine-readable part, `what()` carries the human detail.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail)
        : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code), detail_(detail) {}

    ErrorCode code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string detail_;
};

}  // namespace ddeu
