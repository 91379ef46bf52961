#pragma once

#include <stdexcept>
#include <string>

namespace infint {

enum class ErrorKind {
    InvalidParameters,
    TruncationInsufficient,
    DivergentSum,
    TooLarge,
    DivisionByZeroPoly,
    AnchorCollision,
    NumericalBreakdown,
    ResolutionOverflow,
    InvalidTau,
    BudgetExceeded,
    BudgetTooSmall,
    ParseError,
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace infint
