#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nadyn/rational.hpp"

namespace nadyn {

using Complex = std::complex<double>;

/// Coefficients at or below this modulus are treated as zero.
inline constexpr double kZeroTolerance = 1e-12;
/// Relative t-adic depth kept by inversion when the caller gives none.
inline constexpr std::int64_t kDefaultWorkingOrder = 20;

/// t-adic valuation; an empty value encodes +infinity (the zero series up to
/// truncation).
class Valuation {
public:
    Valuation() = default;
    Valuation(RatExp v) : value_(v) {} // NOLINT: implicit is intended

    static Valuation infinity() { return Valuation(); }

    bool is_infinite() const noexcept { return !value_.has_value(); }
    const RatExp& value() const { return value_.value(); }
    /// |s| = e^{-val(s)}; zero for the infinite valuation.
    double norm() const;

    friend bool operator==(const Valuation&, const Valuation&) = default;
    friend std::strong_ordering operator<=>(const Valuation& a, const Valuation& b)
    {
        if (a.is_infinite() || b.is_infinite()) {
            return static_cast<int>(a.is_infinite()) <=> static_cast<int>(b.is_infinite());
        }
        return *a.value_ <=> *b.value_;
    }

    std::string to_string() const;

private:
    std::optional<RatExp> value_;
};

struct Term {
    RatExp exp;
    Complex coef;
    friend bool operator==(const Term&, const Term&) = default;
};

/// Truncated Puiseux series sum c_k t^{e_k} + O(t^order) with exact rational
/// exponents and floating complex coefficients.
///
/// Terms are kept sorted by strictly increasing exponent, every exponent lies
/// below the truncation order, and coefficients of modulus <= kZeroTolerance
/// are dropped. An absent order means the series is exact (a finite sum).
class PuiseuxSeries {
public:
    PuiseuxSeries() = default;
    PuiseuxSeries(Complex c); // NOLINT: constants convert implicitly
    PuiseuxSeries(double c) : PuiseuxSeries(Complex(c, 0.0)) {} // NOLINT
    PuiseuxSeries(int c) : PuiseuxSeries(Complex(c, 0.0)) {}    // NOLINT
    /// Terms may be unsorted and repeat exponents; they are merged.
    explicit PuiseuxSeries(std::vector<Term> terms, std::optional<RatExp> order = std::nullopt);

    static PuiseuxSeries monomial(Complex c, RatExp e);
    /// The zero series known only below `order`, i.e. O(t^order).
    static PuiseuxSeries big_o(RatExp order);

    const std::vector<Term>& terms() const noexcept { return terms_; }
    const std::optional<RatExp>& order() const noexcept { return order_; }
    bool is_exact() const noexcept { return !order_.has_value(); }
    /// True when no term survives (the series is zero to its truncation).
    bool is_zero() const noexcept { return terms_.empty(); }

    /// lcm of exponent denominators (1 for Laurent series).
    std::int64_t ramification() const;
    Valuation valuation() const;
    Complex leading_coefficient() const;
    Complex coefficient(const RatExp& e) const;
    /// max |c_k|; used for relative comparisons.
    double max_abs_coefficient() const;

    /// Drops terms at or beyond `order` and lowers the truncation to it.
    PuiseuxSeries truncated(const RatExp& order) const;
    /// Multiplies by c * t^e.
    PuiseuxSeries scaled(Complex c, const RatExp& e = RatExp(0)) const;
    /// Forgets the truncation order (declares the series exact as written).
    PuiseuxSeries as_exact() const;

    /// Human/parser readable "c*t^(p/q) + ... + O(t^(p/q))".
    std::string to_string() const;

    /// Structural equality: identical terms and truncation order.
    friend bool operator==(const PuiseuxSeries&, const PuiseuxSeries&) = default;

private:
    std::vector<Term> terms_;
    std::optional<RatExp> order_;
};

std::optional<RatExp> min_order(const std::optional<RatExp>& a, const std::optional<RatExp>& b);

Valuation val(const PuiseuxSeries& s);

PuiseuxSeries add(const PuiseuxSeries& a, const PuiseuxSeries& b);
PuiseuxSeries neg(const PuiseuxSeries& a);
PuiseuxSeries sub(const PuiseuxSeries& a, const PuiseuxSeries& b);
/// Product; terms at or beyond `limit` (when given) are discarded and the
/// truncation order lowered accordingly.
PuiseuxSeries mul(const PuiseuxSeries& a, const PuiseuxSeries& b,
                  const std::optional<RatExp>& limit = std::nullopt);
/// Multiplicative inverse. The expansion of a non-monomial is carried to
/// relative depth `relative_order` beyond -val(a).
PuiseuxSeries inv(const PuiseuxSeries& a, const RatExp& relative_order = RatExp(kDefaultWorkingOrder));
PuiseuxSeries div(const PuiseuxSeries& a, const PuiseuxSeries& b,
                  const RatExp& relative_order = RatExp(kDefaultWorkingOrder));
PuiseuxSeries pow(const PuiseuxSeries& a, unsigned k, const std::optional<RatExp>& limit = std::nullopt);

inline PuiseuxSeries operator+(const PuiseuxSeries& a, const PuiseuxSeries& b) { return add(a, b); }
inline PuiseuxSeries operator-(const PuiseuxSeries& a, const PuiseuxSeries& b) { return sub(a, b); }
inline PuiseuxSeries operator-(const PuiseuxSeries& a) { return neg(a); }
inline PuiseuxSeries operator*(const PuiseuxSeries& a, const PuiseuxSeries& b) { return mul(a, b); }

/// Coefficientwise closeness: every exponent below `below` has coefficients
/// within `tol` (absolute, scaled by max(1, |c|)).
bool approx_equal(const PuiseuxSeries& a, const PuiseuxSeries& b, double tol,
                  const std::optional<RatExp>& below = std::nullopt);

struct ComplexEvaluation {
    Complex value;
    /// |t0|^order, or 0 for exact series.
    double error_bound;
};

/// Numeric value at t = t0 on the branch selecting the q-th root
/// |t0|^{1/q} e^{i(arg t0 + 2 pi branch)/q}, q = ramification.
ComplexEvaluation eval_complex(const PuiseuxSeries& s, Complex t0, std::int64_t branch = 0);

} // namespace nadyn
