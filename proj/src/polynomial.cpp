#include "nadyn/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace nadyn {

namespace {

bool is_noise(Complex sum, double contributions)
{
    return std::abs(sum) <= kZeroTolerance * contributions;
}

std::int64_t lcm64(std::int64_t a, std::int64_t b) { return a / std::gcd(a, b) * b; }

// Largest index i with i/q strictly below `order`.
std::int64_t last_index_below(const RatExp& order, std::int64_t q) { return (order * RatExp(q)).ceil() - 1; }

// Horner evaluation on dense coefficient arrays over a common exponent grid
// t^{1/q}. Truncation orders and the noise rule follow mul and add step by
// step, so the result equals the term-list evaluation.
std::optional<PuiseuxSeries> evaluate_dense(const SeriesPoly& p, const PuiseuxSeries& z,
                                            const std::optional<RatExp>& limit)
{
    constexpr std::int64_t kMaxGrid = 1 << 12;
    if (z.is_zero()) {
        return std::nullopt;
    }
    std::int64_t q = z.ramification();
    for (const auto& c : p) {
        q = lcm64(q, c.ramification());
        if (q > kMaxGrid) {
            return std::nullopt;
        }
    }
    auto index = [q](const RatExp& e) { return e.num() * (q / e.den()); };
    std::vector<std::pair<std::int64_t, Complex>> zt;
    for (const auto& t : z.terms()) {
        zt.emplace_back(index(t.exp), t.coef);
    }
    const RatExp vz = z.terms().front().exp;

    // Accumulator: acc[i] is the coefficient of t^{(lo + i)/q}; zero means absent.
    const PuiseuxSeries& top = p.back();
    std::int64_t lo = 0;
    std::vector<Complex> acc;
    std::optional<RatExp> order = top.order();
    bool exact_zero = top.is_zero() && top.is_exact();
    if (!top.is_zero()) {
        lo = index(top.terms().front().exp);
        acc.assign(static_cast<std::size_t>(index(top.terms().back().exp) - lo + 1), Complex(0.0, 0.0));
        for (const auto& t : top.terms()) {
            acc[static_cast<std::size_t>(index(t.exp) - lo)] = t.coef;
        }
    }
    std::vector<Complex> next;
    std::vector<double> mass;
    for (std::size_t k = p.size() - 1; k-- > 0;) {
        std::optional<RatExp> lim;
        if (limit) {
            lim = *limit - vz * RatExp(static_cast<std::int64_t>(k));
        }
        // Product acc * z.
        std::optional<std::int64_t> first;
        for (std::size_t i = 0; i < acc.size(); ++i) {
            if (acc[i] != Complex(0.0, 0.0)) {
                first = static_cast<std::int64_t>(i);
                break;
            }
        }
        std::optional<RatExp> prod_order;
        std::int64_t plo = 0;
        next.clear();
        mass.clear();
        if (!exact_zero) {
            if (order) {
                prod_order = *order + vz;
            }
            if (z.order()) {
                const std::optional<RatExp> va = first ? std::optional<RatExp>(RatExp(lo + *first, q)) : order;
                if (va) {
                    prod_order = min_order(prod_order, *z.order() + *va);
                }
            }
            prod_order = min_order(prod_order, lim);
            if (first) {
                std::int64_t last = static_cast<std::int64_t>(acc.size()) - 1;
                while (acc[static_cast<std::size_t>(last)] == Complex(0.0, 0.0)) {
                    --last;
                }
                plo = lo + *first + zt.front().first;
                std::int64_t phi = lo + last + zt.back().first;
                if (prod_order) {
                    phi = std::min(phi, last_index_below(*prod_order, q));
                }
                if (phi >= plo) {
                    next.assign(static_cast<std::size_t>(phi - plo + 1), Complex(0.0, 0.0));
                    mass.assign(next.size(), 0.0);
                    for (std::int64_t i = *first; i <= last; ++i) {
                        const Complex a = acc[static_cast<std::size_t>(i)];
                        if (a == Complex(0.0, 0.0)) {
                            continue;
                        }
                        for (const auto& [ej, cj] : zt) {
                            const std::int64_t e = lo + i + ej;
                            if (e > phi) {
                                break;
                            }
                            const Complex pr = a * cj;
                            next[static_cast<std::size_t>(e - plo)] += pr;
                            mass[static_cast<std::size_t>(e - plo)] += std::abs(pr.real()) + std::abs(pr.imag());
                        }
                    }
                    for (std::size_t i = 0; i < next.size(); ++i) {
                        if (is_noise(next[i], mass[i])) {
                            next[i] = 0.0;
                        }
                    }
                }
            }
        }
        // Sum with p[k], then truncate at lim.
        const PuiseuxSeries& c = p[k];
        std::optional<RatExp> sum_order = exact_zero ? c.order() : min_order(prod_order, c.order());
        sum_order = min_order(sum_order, lim);
        std::optional<std::int64_t> cut;
        if (sum_order) {
            cut = last_index_below(*sum_order, q);
        }
        std::int64_t slo = next.empty() ? std::numeric_limits<std::int64_t>::max() : plo;
        std::int64_t shi = next.empty() ? std::numeric_limits<std::int64_t>::min() : plo + static_cast<std::int64_t>(next.size()) - 1;
        if (!c.is_zero()) {
            slo = std::min(slo, index(c.terms().front().exp));
            shi = std::max(shi, index(c.terms().back().exp));
        }
        if (cut) {
            shi = std::min(shi, *cut);
        }
        acc.clear();
        if (shi >= slo) {
            acc.assign(static_cast<std::size_t>(shi - slo + 1), Complex(0.0, 0.0));
            std::vector<double> part(acc.size(), 0.0);
            for (std::size_t i = 0; i < next.size(); ++i) {
                const std::int64_t e = plo + static_cast<std::int64_t>(i);
                if (e <= shi) {
                    acc[static_cast<std::size_t>(e - slo)] = next[i];
                    part[static_cast<std::size_t>(e - slo)] = std::abs(next[i]);
                }
            }
            for (const auto& t : c.terms()) {
                const std::int64_t e = index(t.exp);
                if (e > shi) {
                    break;
                }
                auto& slot = acc[static_cast<std::size_t>(e - slo)];
                const double m = std::max(part[static_cast<std::size_t>(e - slo)], std::abs(t.coef));
                slot += t.coef;
                if (is_noise(slot, m)) {
                    slot = 0.0;
                }
            }
            lo = slo;
        }
        order = sum_order;
        exact_zero = !order && std::all_of(acc.begin(), acc.end(), [](Complex x) { return x == Complex(0.0, 0.0); });
    }
    std::vector<Term> terms;
    for (std::size_t i = 0; i < acc.size(); ++i) {
        if (acc[i] != Complex(0.0, 0.0)) {
            terms.push_back({RatExp(lo + static_cast<std::int64_t>(i), q), acc[i]});
        }
    }
    return PuiseuxSeries(std::move(terms), order);
}

} // namespace

PuiseuxSeries evaluate(const SeriesPoly& p, const PuiseuxSeries& z, const std::optional<RatExp>& limit)
{
    if (p.empty()) {
        return PuiseuxSeries();
    }
    if (auto fast = evaluate_dense(p, z, limit)) {
        return *std::move(fast);
    }
    const Valuation vz = z.valuation();
    auto cut = [&](std::size_t k) -> std::optional<RatExp> {
        if (!limit) {
            return std::nullopt;
        }
        if (vz.is_infinite()) {
            return limit;
        }
        return *limit - vz.value() * RatExp(static_cast<std::int64_t>(k));
    };
    PuiseuxSeries acc = p.back();
    for (std::size_t k = p.size() - 1; k-- > 0;) {
        const auto lim = cut(k);
        acc = add(mul(acc, z, lim), p[k]);
        if (lim) {
            acc = acc.truncated(*lim);
        }
    }
    return acc;
}

SeriesPoly taylor_shift(const SeriesPoly& p, const PuiseuxSeries& z0, const std::optional<RatExp>& limit)
{
    SeriesPoly b = p;
    const std::size_t n = b.size();
    auto cap = [&](PuiseuxSeries s) { return limit ? s.truncated(*limit) : s; };
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t k = n - 1; k-- > i;) {
            b[k] = cap(add(b[k], mul(z0, b[k + 1], limit)));
        }
    }
    return b;
}

ComplexPoly evaluate_coefficients(const SeriesPoly& p, Complex t0)
{
    ComplexPoly out;
    out.reserve(p.size());
    for (const auto& s : p) {
        out.push_back(s.is_zero() ? Complex(0.0, 0.0) : eval_complex(s, t0).value);
    }
    return out;
}

} // namespace nadyn
