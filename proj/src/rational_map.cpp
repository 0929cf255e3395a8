#include "nadyn/rational_map.hpp"

namespace nadyn {

ComplexRationalMap specialize(const RationalMap& f, Complex t0)
{
    return ComplexRationalMap(evaluate_coefficients(f.p(), t0), evaluate_coefficients(f.q(), t0), f.degree());
}

RationalMap iterate(const RationalMap& f, int n, std::size_t budget)
{
    if (n < 1) {
        throw Error(ErrorCode::PreconditionFailed, "iterate needs n >= 1");
    }
    std::size_t size = 1;
    for (int k = 0; k < n; ++k) {
        size *= static_cast<std::size_t>(f.degree());
        if (size > budget) {
            throw Error(ErrorCode::SizeBudgetExceeded,
                        "degree of iterate " + std::to_string(n) + " exceeds budget " + std::to_string(budget));
        }
    }
    RationalMap g = f;
    for (int k = 1; k < n; ++k) {
        g = compose(f, g);
    }
    return g;
}

RationalMap conjugate(const RationalMap& f, const Mobius& m)
{
    return compose(m.as_map(), compose(f, m.inverse().as_map()));
}

SeriesPoint apply(const Mobius& m, const SeriesPoint& x)
{
    return image(m.as_map(), x);
}

bool lands_affine(const PuiseuxSeries& a, const PuiseuxSeries& b)
{
    if (a.is_zero() && b.is_zero()) {
        throw Error(ErrorCode::ChartFailure, "numerator and denominator vanish to truncation");
    }
    return !(val(a) < val(b));
}

PuiseuxSeries quotient(const PuiseuxSeries& a, const PuiseuxSeries& b)
{
    // Relative depth bounded by whatever truncation the operands carry.
    return div(a, b, RatExp(2 * kDefaultWorkingOrder));
}

std::string to_string(const RationalMap& f)
{
    auto poly = [](const SeriesPoly& p) {
        std::string out;
        for (std::size_t k = 0; k < p.size(); ++k) {
            if (p[k].is_zero()) {
                continue;
            }
            if (!out.empty()) {
                out += " + ";
            }
            out += "(" + p[k].to_string() + ")";
            if (k > 0) {
                out += "*z^" + std::to_string(k);
            }
        }
        return out.empty() ? std::string("0") : out;
    };
    return "(" + poly(f.p()) + ")/(" + poly(f.q()) + ")";
}

} // namespace nadyn
