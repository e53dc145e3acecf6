#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rsvm {

enum class ErrorCode {
    InvalidArgument,
    DimensionMismatch,
    ZeroDirection,
    InfeasibleCap,
    InvalidHullPoint,
    NotConverged,
    NonSeparable,
    DegenerateMargin,
    OverlappingSets,
    CoincidentPoints,
    BudgetExceeded,
    ParseError,
    IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for the library; `code()` identifies the failure class.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace rsvm
