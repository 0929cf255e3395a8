#include "nadyn/rational.hpp"

#include <ostream>

#include "nadyn/error.hpp"

namespace nadyn {

std::string_view error_code_name(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::ZeroDivision: return "ZeroDivision";
    case ErrorCode::RamificationCapExceeded: return "RamificationCapExceeded";
    case ErrorCode::ClusterAmbiguity: return "ClusterAmbiguity";
    case ErrorCode::MatchAmbiguity: return "MatchAmbiguity";
    case ErrorCode::MatchFailure: return "MatchFailure";
    case ErrorCode::SizeBudgetExceeded: return "SizeBudgetExceeded";
    case ErrorCode::FormalCycleAmbiguity: return "FormalCycleAmbiguity";
    case ErrorCode::ChartFailure: return "ChartFailure";
    case ErrorCode::TruncationExhausted: return "TruncationExhausted";
    case ErrorCode::NoBreakpoint: return "NoBreakpoint";
    case ErrorCode::BoundaryAmbiguity: return "BoundaryAmbiguity";
    case ErrorCode::RootFinderNonConvergence: return "RootFinderNonConvergence";
    case ErrorCode::ContinuationLost: return "ContinuationLost";
    case ErrorCode::NoMatch: return "NoMatch";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::DegreeMismatch: return "DegreeMismatch";
    case ErrorCode::InvalidFamily: return "InvalidFamily";
    case ErrorCode::PreconditionFailed: return "PreconditionFailed";
    }
    return "Unknown";
}

RatExp::RatExp(std::int64_t n, std::int64_t d)
{
    if (d == 0) {
        throw Error(ErrorCode::ZeroDivision, "rational exponent with zero denominator");
    }
    if (d < 0) {
        n = -n;
        d = -d;
    }
    const std::int64_t g = std::gcd(n < 0 ? -n : n, d);
    num_ = g > 1 ? n / g : n;
    den_ = g > 1 ? d / g : d;
}

std::int64_t RatExp::floor() const noexcept
{
    std::int64_t q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) {
        --q;
    }
    return q;
}

std::int64_t RatExp::ceil() const noexcept
{
    std::int64_t q = num_ / den_;
    if (num_ % den_ != 0 && num_ > 0) {
        ++q;
    }
    return q;
}

RatExp operator+(const RatExp& a, const RatExp& b)
{
    if (a.den_ == b.den_) {
        return RatExp(a.num_ + b.num_, a.den_);
    }
    const std::int64_t g = std::gcd(a.den_, b.den_);
    return RatExp(a.num_ * (b.den_ / g) + b.num_ * (a.den_ / g), a.den_ / g * b.den_);
}

RatExp operator-(const RatExp& a, const RatExp& b) { return a + (-b); }

RatExp operator*(const RatExp& a, const RatExp& b)
{
    const std::int64_t g1 = std::gcd(a.num_ < 0 ? -a.num_ : a.num_, b.den_);
    const std::int64_t g2 = std::gcd(b.num_ < 0 ? -b.num_ : b.num_, a.den_);
    const std::int64_t n1 = g1 ? a.num_ / g1 : a.num_;
    const std::int64_t d2 = g1 ? b.den_ / g1 : b.den_;
    const std::int64_t n2 = g2 ? b.num_ / g2 : b.num_;
    const std::int64_t d1 = g2 ? a.den_ / g2 : a.den_;
    return RatExp(n1 * n2, d1 * d2);
}

RatExp operator/(const RatExp& a, const RatExp& b)
{
    if (b.num_ == 0) {
        throw Error(ErrorCode::ZeroDivision, "division of rational exponent by zero");
    }
    return a * RatExp(b.den_, b.num_);
}

std::string RatExp::to_string() const
{
    if (den_ == 1) {
        return std::to_string(num_);
    }
    return std::to_string(num_) + "/" + std::to_string(den_);
}

std::ostream& operator<<(std::ostream& os, const RatExp& r) { return os << r.to_string(); }

RatExp parse_ratexp(const std::string& text)
{
    const auto slash = text.find('/');
    try {
        if (slash == std::string::npos) {
            return RatExp(std::stoll(text));
        }
        return RatExp(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
    } catch (const std::logic_error&) {
        throw Error(ErrorCode::SyntaxError, "malformed rational '" + text + "'");
    }
}

} // namespace nadyn
