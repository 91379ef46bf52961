#include "infint/error.hpp"

namespace infint {

const char* error_kind_name(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidParameters: return "InvalidParameters";
    case ErrorKind::TruncationInsufficient: return "TruncationInsufficient";
    case ErrorKind::DivergentSum: return "DivergentSum";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::DivisionByZeroPoly: return "DivisionByZeroPoly";
    case ErrorKind::AnchorCollision: return "AnchorCollision";
    case ErrorKind::NumericalBreakdown: return "NumericalBreakdown";
    case ErrorKind::ResolutionOverflow: return "ResolutionOverflow";
    case ErrorKind::InvalidTau: return "InvalidTau";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::BudgetTooSmall: return "BudgetTooSmall";
    case ErrorKind::ParseError: return "ParseError";
    }
    return "Unknown";
}

}  // namespace infint
