#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "nadyn/error.hpp"
#include "nadyn/polynomial.hpp"

namespace nadyn {

/// Points of P^1 live in one of two charts: z (val z >= 0, resp. |z| <= 1)
/// or w = 1/z (val w > 0, resp. |w| > 1 for z). w = 0 is infinity.
enum class Chart { Affine, Flipped };

template <class S>
struct ChartPoint {
    Chart chart = Chart::Affine;
    S coord{};
};

using SeriesPoint = ChartPoint<PuiseuxSeries>;
using ComplexPoint = ChartPoint<Complex>;

/// f = P/Q with both read as homogeneous forms of degree `degree`.
template <class S>
class BasicRationalMap {
public:
    BasicRationalMap() = default;
    BasicRationalMap(Poly<S> p, Poly<S> q, std::optional<int> frame = std::nullopt)
        : p_(std::move(p)), q_(std::move(q))
    {
        degree_ = frame ? *frame : std::max(nadyn::degree(p_), nadyn::degree(q_));
        if (degree_ < 0) {
            throw Error(ErrorCode::InvalidFamily, "numerator and denominator both vanish");
        }
        if (nadyn::degree(q_) < 0) {
            throw Error(ErrorCode::InvalidFamily, "denominator vanishes identically");
        }
        p_.resize(static_cast<std::size_t>(degree_ + 1), S(0.0));
        q_.resize(static_cast<std::size_t>(degree_ + 1), S(0.0));
        p_rev_ = reversed(p_, degree_);
        q_rev_ = reversed(q_, degree_);
    }

    const Poly<S>& p() const { return p_; }
    const Poly<S>& q() const { return q_; }
    int degree() const { return degree_; }

    /// Numerator and denominator of f read in the given source chart.
    const Poly<S>& numerator(Chart source) const { return source == Chart::Affine ? p_ : p_rev_; }
    const Poly<S>& denominator(Chart source) const { return source == Chart::Affine ? q_ : q_rev_; }

    bool is_polynomial() const { return nadyn::degree(q_) == 0 && nadyn::degree(p_) == degree_; }

private:
    Poly<S> p_;
    Poly<S> q_;
    Poly<S> p_rev_;
    Poly<S> q_rev_;
    int degree_ = -1;
};

using RationalMap = BasicRationalMap<PuiseuxSeries>;
using ComplexRationalMap = BasicRationalMap<Complex>;

/// Specialization of the coefficients at t = t0 (branch 0).
ComplexRationalMap specialize(const RationalMap& f, Complex t0);

/// f o g without common-factor cancellation; degree deg f * deg g.
template <class S>
BasicRationalMap<S> compose(const BasicRationalMap<S>& f, const BasicRationalMap<S>& g)
{
    const int d = f.degree();
    std::vector<Poly<S>> pow_p{Poly<S>{S(1.0)}};
    std::vector<Poly<S>> pow_q{Poly<S>{S(1.0)}};
    for (int k = 1; k <= d; ++k) {
        pow_p.push_back(poly_mul(pow_p.back(), g.p()));
        pow_q.push_back(poly_mul(pow_q.back(), g.q()));
    }
    Poly<S> p;
    Poly<S> q;
    for (int k = 0; k <= d; ++k) {
        const S& a = f.p()[static_cast<std::size_t>(k)];
        const S& b = f.q()[static_cast<std::size_t>(k)];
        if (is_zero_coefficient(a) && is_zero_coefficient(b)) {
            continue;
        }
        const Poly<S> mono = poly_mul(pow_p[static_cast<std::size_t>(k)], pow_q[static_cast<std::size_t>(d - k)]);
        if (!is_zero_coefficient(a)) {
            p = poly_add(p, poly_scale(mono, a));
        }
        if (!is_zero_coefficient(b)) {
            q = poly_add(q, poly_scale(mono, b));
        }
    }
    return BasicRationalMap<S>(std::move(p), std::move(q), d * g.degree());
}

/// f^n by repeated composition. Throws SizeBudgetExceeded if d^n > budget.
RationalMap iterate(const RationalMap& f, int n, std::size_t budget = 5000);

/// Moebius transformation z -> (a z + b)/(c z + d).
struct Mobius {
    PuiseuxSeries a{1.0};
    PuiseuxSeries b{0.0};
    PuiseuxSeries c{0.0};
    PuiseuxSeries d{1.0};

    Mobius inverse() const { return {d, neg(b), neg(c), a}; }
    RationalMap as_map() const { return RationalMap(SeriesPoly{b, a}, SeriesPoly{d, c}, 1); }
};

/// M o f o M^{-1}.
RationalMap conjugate(const RationalMap& f, const Mobius& m);

/// Image of a point of P^1 under the Moebius map.
SeriesPoint apply(const Mobius& m, const SeriesPoint& x);

/// Numerical helpers shared by the series and complex instantiations.
inline Complex poly_value(const ComplexPoly& p, const Complex& z) { return evaluate(p, z); }
inline PuiseuxSeries poly_value(const SeriesPoly& p, const PuiseuxSeries& z) { return evaluate(p, z, std::nullopt); }

inline bool lands_affine(const Complex& a, const Complex& b) { return std::abs(a) <= std::abs(b); }
bool lands_affine(const PuiseuxSeries& a, const PuiseuxSeries& b);

inline Complex quotient(const Complex& a, const Complex& b) { return a / b; }
PuiseuxSeries quotient(const PuiseuxSeries& a, const PuiseuxSeries& b);

/// f(x) in the chart it lands in.
template <class S>
ChartPoint<S> image(const BasicRationalMap<S>& f, const ChartPoint<S>& x)
{
    const S a = poly_value(f.numerator(x.chart), x.coord);
    const S b = poly_value(f.denominator(x.chart), x.coord);
    if (lands_affine(a, b)) {
        return {Chart::Affine, quotient(a, b)};
    }
    return {Chart::Flipped, quotient(b, a)};
}

/// Derivative of f at x, from the chart of x to the chart `target`.
template <class S>
S chart_derivative(const BasicRationalMap<S>& f, const ChartPoint<S>& x, Chart target)
{
    const Poly<S>& n = f.numerator(x.chart);
    const Poly<S>& d = f.denominator(x.chart);
    const S a = poly_value(n, x.coord);
    const S b = poly_value(d, x.coord);
    const S da = poly_value(derivative(n), x.coord);
    const S db = poly_value(derivative(d), x.coord);
    if (target == Chart::Affine) {
        return quotient(da * b - a * db, b * b);
    }
    return quotient(db * a - b * da, a * a);
}

/// Multiplier of the cycle x_0 -> x_1 -> ... -> x_{m-1} -> x_0.
template <class S>
S cycle_multiplier(const BasicRationalMap<S>& f, const std::vector<ChartPoint<S>>& orbit)
{
    S mu(1.0);
    for (std::size_t i = 0; i < orbit.size(); ++i) {
        const Chart next = orbit[(i + 1) % orbit.size()].chart;
        mu = mu * chart_derivative(f, orbit[i], next);
    }
    return mu;
}

/// Fixed-point form of f^n: P_n(z) - z Q_n(z) in the affine chart and its
/// reverse w^{D+1} F(1/w) in the flipped chart, D = deg f^n.
template <class S>
Poly<S> fixed_form(const BasicRationalMap<S>& fn, Chart chart)
{
    Poly<S> zq(fn.q().size() + 1, S(0.0));
    for (std::size_t k = 0; k < fn.q().size(); ++k) {
        zq[k + 1] = fn.q()[k];
    }
    Poly<S> f = poly_add(fn.p(), poly_scale(zq, S(-1.0)));
    f.resize(static_cast<std::size_t>(fn.degree() + 2), S(0.0));
    if (chart == Chart::Affine) {
        return f;
    }
    return reversed(f, fn.degree() + 1);
}

std::string to_string(const RationalMap& f);

} // namespace nadyn
