#pragma once

#include <optional>
#include <vector>

#include "nadyn/puiseux.hpp"

namespace nadyn {

/// Dense univariate polynomial, coefficients in ascending degree.
template <class S>
using Poly = std::vector<S>;

using SeriesPoly = Poly<PuiseuxSeries>;
using ComplexPoly = Poly<Complex>;

inline bool is_zero_coefficient(const PuiseuxSeries& s) { return s.is_zero(); }
inline bool is_zero_coefficient(const Complex& c) { return c == Complex(0.0, 0.0); }

/// Index of the highest nonzero coefficient; -1 for the zero polynomial.
template <class S>
int degree(const Poly<S>& p)
{
    for (int k = static_cast<int>(p.size()) - 1; k >= 0; --k) {
        if (!is_zero_coefficient(p[static_cast<std::size_t>(k)])) {
            return k;
        }
    }
    return -1;
}

template <class S>
Poly<S> trimmed(Poly<S> p)
{
    p.resize(static_cast<std::size_t>(degree(p) + 1));
    return p;
}

template <class S>
Poly<S> derivative(const Poly<S>& p)
{
    Poly<S> d;
    for (std::size_t k = 1; k < p.size(); ++k) {
        d.push_back(p[k] * S(static_cast<double>(k)));
    }
    return d;
}

template <class S>
Poly<S> poly_add(const Poly<S>& a, const Poly<S>& b)
{
    Poly<S> r(std::max(a.size(), b.size()), S(0.0));
    for (std::size_t k = 0; k < a.size(); ++k) {
        r[k] = r[k] + a[k];
    }
    for (std::size_t k = 0; k < b.size(); ++k) {
        r[k] = r[k] + b[k];
    }
    return r;
}

template <class S>
Poly<S> poly_scale(const Poly<S>& a, const S& c)
{
    Poly<S> r;
    r.reserve(a.size());
    for (const auto& x : a) {
        r.push_back(x * c);
    }
    return r;
}

template <class S>
Poly<S> poly_mul(const Poly<S>& a, const Poly<S>& b)
{
    if (a.empty() || b.empty()) {
        return {};
    }
    Poly<S> r(a.size() + b.size() - 1, S(0.0));
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (is_zero_coefficient(a[i])) {
            continue;
        }
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (!is_zero_coefficient(b[j])) {
                r[i + j] = r[i + j] + a[i] * b[j];
            }
        }
    }
    return r;
}

/// Coefficients reversed inside a frame of formal degree `d`:
/// z^d p(1/z), i.e. the polynomial in the flipped chart.
template <class S>
Poly<S> reversed(const Poly<S>& p, int d)
{
    Poly<S> r(static_cast<std::size_t>(d + 1), S(0.0));
    for (std::size_t k = 0; k < p.size() && static_cast<int>(k) <= d; ++k) {
        r[static_cast<std::size_t>(d) - k] = p[k];
    }
    return r;
}

template <class S>
S evaluate(const Poly<S>& p, const S& z)
{
    S acc(0.0);
    for (auto it = p.rbegin(); it != p.rend(); ++it) {
        acc = acc * z + *it;
    }
    return acc;
}

/// Horner evaluation keeping only exponents below `limit` in the result.
/// Intermediate sums are cut at limit - k val(z) so no needed term is lost.
PuiseuxSeries evaluate(const SeriesPoly& p, const PuiseuxSeries& z, const std::optional<RatExp>& limit);

/// Coefficients of p(z0 + w) in w (Taylor shift by repeated synthetic division).
SeriesPoly taylor_shift(const SeriesPoly& p, const PuiseuxSeries& z0, const std::optional<RatExp>& limit = std::nullopt);

/// Coefficients with each exponent below `limit`; mapped from series to complex
/// by evaluation at t0 on branch 0.
ComplexPoly evaluate_coefficients(const SeriesPoly& p, Complex t0);

} // namespace nadyn
