#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <numeric>
#include <stdexcept>
#include <string>

namespace nadyn {

/// Exact rational number p/q in lowest terms with q > 0.
///
/// Used for t-exponents, valuations and Berkovich radii, all of which must
/// be compared exactly.
class RatExp {
public:
    constexpr RatExp() = default;
    constexpr RatExp(std::int64_t n) : num_(n), den_(1) {} // NOLINT: implicit from integers is intended
    RatExp(std::int64_t n, std::int64_t d);

    constexpr std::int64_t num() const noexcept { return num_; }
    constexpr std::int64_t den() const noexcept { return den_; }

    double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }
    bool is_integer() const noexcept { return den_ == 1; }

    /// Largest integer <= *this.
    std::int64_t floor() const noexcept;
    std::int64_t ceil() const noexcept;

    friend RatExp operator+(const RatExp& a, const RatExp& b);
    friend RatExp operator-(const RatExp& a, const RatExp& b);
    friend RatExp operator*(const RatExp& a, const RatExp& b);
    friend RatExp operator/(const RatExp& a, const RatExp& b);
    RatExp operator-() const { return RatExp(-num_, den_); }
    RatExp& operator+=(const RatExp& o) { return *this = *this + o; }
    RatExp& operator-=(const RatExp& o) { return *this = *this - o; }

    friend bool operator==(const RatExp& a, const RatExp& b) noexcept = default;
    friend std::strong_ordering operator<=>(const RatExp& a, const RatExp& b) noexcept
    {
        // Cross-multiplication in 128 bits; denominators are small in practice.
        const __int128 l = static_cast<__int128>(a.num_) * b.den_;
        const __int128 r = static_cast<__int128>(b.num_) * a.den_;
        return l <=> r;
    }

    std::string to_string() const;

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

std::ostream& operator<<(std::ostream& os, const RatExp& r);

inline RatExp min(const RatExp& a, const RatExp& b) { return b < a ? b : a; }
inline RatExp max(const RatExp& a, const RatExp& b) { return a < b ? b : a; }

/// Parses "p", "-p" or "p/q".
RatExp parse_ratexp(const std::string& text);

} // namespace nadyn

template <>
struct std::hash<nadyn::RatExp> {
    std::size_t operator()(const nadyn::RatExp& r) const noexcept
    {
        return std::hash<std::int64_t>{}(r.num()) * 1000003u ^ std::hash<std::int64_t>{}(r.den());
    }
};
