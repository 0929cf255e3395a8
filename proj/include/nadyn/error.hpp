#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nadyn {

// Stable error codes; the CLI surfaces these verbatim.
enum class ErrorCode {
    ZeroDivision,
    RamificationCapExceeded,
    ClusterAmbiguity,
    MatchAmbiguity,
    MatchFailure,
    SizeBudgetExceeded,
    FormalCycleAmbiguity,
    ChartFailure,
    TruncationExhausted,
    NoBreakpoint,
    BoundaryAmbiguity,
    RootFinderNonConvergence,
    ContinuationLost,
    NoMatch,
    SyntaxError,
    DegreeMismatch,
    InvalidFamily,
    PreconditionFailed,
};

std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace nadyn
