#include "nadyn/newton_puiseux.hpp"

#include <algorithm>
#include <cmath>

namespace nadyn {

NewtonPolygon newton_polygon(const SeriesPoly& p)
{
    std::vector<std::pair<int, RatExp>> pts;
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (!p[k].is_zero()) {
            pts.emplace_back(static_cast<int>(k), p[k].valuation().value());
        }
    }
    NewtonPolygon poly;
    // Lower hull by monotone chain; cross products in exact rationals.
    for (const auto& q : pts) {
        while (poly.vertices.size() >= 2) {
            const auto& a = poly.vertices[poly.vertices.size() - 2];
            const auto& b = poly.vertices.back();
            const RatExp cross = RatExp(b.first - a.first) * (q.second - a.second)
                - (b.second - a.second) * RatExp(q.first - a.first);
            if (cross <= RatExp(0)) {
                poly.vertices.pop_back();
            } else {
                break;
            }
        }
        poly.vertices.push_back(q);
    }
    for (std::size_t i = 0; i + 1 < poly.vertices.size(); ++i) {
        const auto& a = poly.vertices[i];
        const auto& b = poly.vertices[i + 1];
        poly.segments.push_back({(b.second - a.second) / RatExp(b.first - a.first), a.first, b.first});
    }
    return poly;
}

Valuation match_valuation(const PuiseuxSeries& a, const PuiseuxSeries& b, double relative_tolerance)
{
    const PuiseuxSeries d = sub(a, b);
    for (const auto& t : d.terms()) {
        const double scale = std::max({1.0, std::abs(a.coefficient(t.exp)), std::abs(b.coefficient(t.exp))});
        if (std::abs(t.coef) > relative_tolerance * scale) {
            return Valuation(t.exp);
        }
    }
    if (d.order()) {
        return Valuation(*d.order());
    }
    return Valuation::infinity();
}

namespace {

bool all_exact(const SeriesPoly& p)
{
    return std::all_of(p.begin(), p.end(), [](const PuiseuxSeries& s) { return s.is_exact(); });
}

PuiseuxSeries drop_at(const PuiseuxSeries& s, const RatExp& e)
{
    std::vector<Term> kept;
    for (const auto& t : s.terms()) {
        if (t.exp != e) {
            kept.push_back(t);
        }
    }
    return PuiseuxSeries(std::move(kept), s.order());
}

class Solver {
public:
    explicit Solver(const PuiseuxOptions& options) : options_(options) {}

    void solve(const SeriesPoly& p, const RatExp& target, RootRegion region, std::vector<PuiseuxRoot>& out) const
    {
        const int d = degree(p);
        if (d < 1) {
            return;
        }
        int k0 = 0;
        while (p[static_cast<std::size_t>(k0)].is_zero()) {
            ++k0;
        }
        if (k0 > 0) {
            out.push_back({zero_root(p, k0), k0});
        }
        const SeriesPoly tail(p.begin() + k0, p.begin() + d + 1);
        const NewtonPolygon polygon = newton_polygon(tail);
        const SeriesPoly dp = derivative(p);
        for (const auto& seg : polygon.segments) {
            const RatExp mu = -seg.slope;
            if ((region == RootRegion::Positive && mu <= RatExp(0))
                || (region == RootRegion::NonNegative && mu < RatExp(0))) {
                continue;
            }
            if (mu.den() > options_.ramification_cap) {
                throw Error(ErrorCode::RamificationCapExceeded,
                            "root valuation " + mu.to_string() + " exceeds ramification cap");
            }
            const int start = seg.start + k0;
            const int end = seg.end + k0;
            const RatExp m = p[static_cast<std::size_t>(start)].valuation().value() + mu * RatExp(start);
            ComplexPoly phi(static_cast<std::size_t>(end - start + 1), Complex(0.0, 0.0));
            for (int k = start; k <= end; ++k) {
                const auto& a = p[static_cast<std::size_t>(k)];
                if (!a.is_zero() && a.valuation().value() + mu * RatExp(k) == m) {
                    phi[static_cast<std::size_t>(k - start)] = a.leading_coefficient();
                }
            }
            const auto char_roots = aberth_roots(phi, options_.aberth);
            for (const auto& cluster : cluster_roots(phi, char_roots, options_.cluster)) {
                if (cluster.multiplicity == 1) {
                    out.push_back({newton_lift(p, dp, cluster.center, mu, m, target), 1});
                } else {
                    lift_cluster(p, cluster.center, cluster.multiplicity, mu, m, target, out);
                }
            }
        }
    }

private:
    // Root z = 0 of multiplicity k0 split off the low coefficients.
    static PuiseuxSeries zero_root(const SeriesPoly& p, int k0)
    {
        bool exact = true;
        std::optional<RatExp> bound;
        const RatExp vk = p[static_cast<std::size_t>(k0)].valuation().value();
        for (int j = 0; j < k0; ++j) {
            const auto& a = p[static_cast<std::size_t>(j)];
            if (!a.is_exact()) {
                exact = false;
                const RatExp b = (*a.order() - vk) / RatExp(k0 - j);
                bound = bound ? min(*bound, b) : b;
            }
        }
        return exact ? PuiseuxSeries() : PuiseuxSeries::big_o(*bound);
    }

    PuiseuxSeries newton_lift(const SeriesPoly& p0, const SeriesPoly& dp0, Complex c, const RatExp& mu,
                              const RatExp& m, const RatExp& target) const
    {
        // Lift the balancing terms to unit size so small residuals survive the
        // absolute drop of negligible coefficients.
        double balance = 0.0;
        for (std::size_t k = 0; k < p0.size(); ++k) {
            const Valuation v = p0[k].valuation();
            if (!p0[k].is_zero() && v.value() + mu * RatExp(static_cast<std::int64_t>(k)) == m) {
                balance = std::max(balance, std::abs(p0[k].leading_coefficient()) *
                                                std::pow(std::abs(c), static_cast<double>(k)));
            }
        }
        const double scale = balance > 0.0 && balance < 1.0 ? 1.0 / balance : 1.0;
        SeriesPoly p = p0;
        SeriesPoly dp = dp0;
        if (scale != 1.0) {
            for (auto& a : p) {
                a = a.scaled(Complex(scale));
            }
            for (auto& a : dp) {
                a = a.scaled(Complex(scale));
            }
        }
        PuiseuxSeries z = PuiseuxSeries::monomial(c, mu);
        if (!(mu < target)) {
            return z.truncated(target);
        }
        const RatExp depth = target - mu;
        PuiseuxSeries f = evaluate(p, z, m + depth);
        f = drop_at_or_below(f, m);
        if (f.is_zero()) {
            return finish(p, z, target, f, m - mu);
        }
        RatExp e = f.valuation().value() - m;
        for (int iter = 0; iter < 64; ++iter) {
            const RatExp e2 = min(e + e, depth);
            const RatExp lim = m + e2;
            f = evaluate(p, z, lim);
            const PuiseuxSeries fp = evaluate(dp, z, m - mu + e2);
            if (f.is_zero()) {
                // Correct to this depth already; a gap in the expansion is not convergence.
                e = e2;
                if (!(e < depth)) {
                    break;
                }
                continue;
            }
            const PuiseuxSeries delta = mul(f, inv(fp, e2), mu + e2);
            z = sub(z, delta).truncated(mu + e2).as_exact();
            e = e2;
            if (!(e < depth)) {
                break;
            }
        }
        // Full-depth passes refine coefficients settled early in the doubling.
        PuiseuxSeries residual = evaluate(p, z, m + depth);
        for (int pass = 0; pass < 3 && !residual.is_zero(); ++pass) {
            const PuiseuxSeries fp = evaluate(dp, z, m - mu + depth);
            z = sub(z, mul(residual, inv(fp, depth), target)).truncated(target).as_exact();
            residual = evaluate(p, z, m + depth);
        }
        return finish(p, z, target, residual, m - mu);
    }

    static PuiseuxSeries drop_at_or_below(const PuiseuxSeries& s, const RatExp& e)
    {
        std::vector<Term> kept;
        for (const auto& t : s.terms()) {
            if (e < t.exp) {
                kept.push_back(t);
            }
        }
        return PuiseuxSeries(std::move(kept), s.order());
    }

    // Declares the reached precision; an exact root of an exact polynomial
    // stays exact.
    static PuiseuxSeries finish(const SeriesPoly& p, const PuiseuxSeries& z, const RatExp& reached,
                                const PuiseuxSeries& residual, const RatExp& derivative_valuation)
    {
        if (all_exact(p) && z.terms().size() <= 8) {
            const PuiseuxSeries r = evaluate(p, z.as_exact(), std::nullopt);
            if (r.is_zero() && r.is_exact()) {
                return z.as_exact();
            }
        }
        RatExp order = reached;
        if (residual.order()) {
            order = min(order, *residual.order() - derivative_valuation);
        }
        return z.truncated(order);
    }

    void lift_cluster(const SeriesPoly& p, Complex c, int r, const RatExp& mu, const RatExp& m,
                      const RatExp& target, std::vector<PuiseuxRoot>& out) const
    {
        const RatExp depth = target - mu;
        const int d = degree(p);
        std::optional<RatExp> cut;
        if (!(all_exact(p) && d <= 64)) {
            cut = depth + depth + RatExp(1);
        }
        for (int attempt = 0; attempt < 2; ++attempt) {
            // H(w) = t^{-m} p(t^mu (c + w)).
            SeriesPoly g(static_cast<std::size_t>(d + 1));
            for (int k = 0; k <= d; ++k) {
                g[static_cast<std::size_t>(k)] = p[static_cast<std::size_t>(k)].scaled(1.0, mu * RatExp(k) - m);
            }
            SeriesPoly h = shift_by_constant(g, c, cut);
            // c is an r-fold characteristic root: the constant parts below degree r vanish.
            for (int j = 0; j < r; ++j) {
                h[static_cast<std::size_t>(j)] = drop_at(h[static_cast<std::size_t>(j)], RatExp(0));
            }
            std::vector<PuiseuxRoot> inner;
            solve(h, depth, RootRegion::Positive, inner);
            int found = 0;
            for (const auto& w : inner) {
                found += w.multiplicity;
            }
            if (found == r) {
                const PuiseuxSeries lead = PuiseuxSeries::monomial(c, mu);
                for (const auto& w : inner) {
                    out.push_back({add(lead, w.series.scaled(1.0, mu)), w.multiplicity});
                }
                return;
            }
            if (!cut) {
                break;
            }
            cut = *cut + *cut;
        }
        throw Error(ErrorCode::ClusterAmbiguity, "branches sharing a leading term could not be separated");
    }

    // Taylor shift p(w + c). An envelope of absolute values runs alongside;
    // terms below its rounding level are indistinguishable from zero and
    // would otherwise become spurious Newton polygon vertices.
    static SeriesPoly shift_by_constant(SeriesPoly b, Complex c, const std::optional<RatExp>& cut)
    {
        const std::size_t n = b.size();
        if (cut) {
            for (auto& s : b) {
                s = s.truncated(*cut);
            }
        }
        SeriesPoly env;
        env.reserve(n);
        for (const auto& s : b) {
            env.push_back(abs_coefficients(s));
        }
        const double ac = std::abs(c);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            for (std::size_t k = n - 1; k-- > i;) {
                b[k] = add(b[k], b[k + 1].scaled(c));
                env[k] = add(env[k], env[k + 1].scaled(ac));
            }
        }
        for (std::size_t k = 0; k < n; ++k) {
            std::vector<Term> kept;
            for (const auto& t : b[k].terms()) {
                if (std::abs(t.coef) > kShiftNoise * std::abs(env[k].coefficient(t.exp))) {
                    kept.push_back(t);
                }
            }
            b[k] = PuiseuxSeries(std::move(kept), b[k].order());
        }
        return b;
    }

    static constexpr double kShiftNoise = 1e-11;

    static PuiseuxSeries abs_coefficients(const PuiseuxSeries& s)
    {
        std::vector<Term> terms;
        terms.reserve(s.terms().size());
        for (const auto& t : s.terms()) {
            terms.push_back({t.exp, Complex(std::abs(t.coef))});
        }
        return PuiseuxSeries(std::move(terms), s.order());
    }

    const PuiseuxOptions& options_;
};

} // namespace

std::vector<PuiseuxRoot> puiseux_roots(const SeriesPoly& p, const PuiseuxOptions& options)
{
    if (degree(p) < 1) {
        throw Error(ErrorCode::PreconditionFailed, "polynomial of degree < 1 has no root set");
    }
    std::vector<PuiseuxRoot> roots;
    Solver(options).solve(p, options.precision, options.region, roots);
    for (const auto& r : roots) {
        if (r.series.ramification() > options.ramification_cap) {
            throw Error(ErrorCode::RamificationCapExceeded,
                        "root ramification " + std::to_string(r.series.ramification()) + " exceeds cap");
        }
    }
    std::stable_sort(roots.begin(), roots.end(), [](const PuiseuxRoot& a, const PuiseuxRoot& b) {
        const Valuation va = a.series.valuation();
        const Valuation vb = b.series.valuation();
        if (va != vb) {
            return va < vb;
        }
        const Complex ca = a.series.leading_coefficient();
        const Complex cb = b.series.leading_coefficient();
        if (ca.real() != cb.real()) {
            return ca.real() < cb.real();
        }
        return ca.imag() < cb.imag();
    });
    return roots;
}

std::vector<std::vector<std::size_t>> separate_orbits(const std::vector<PuiseuxRoot>& roots,
                                                      const std::function<PuiseuxSeries(const PuiseuxSeries&)>& step,
                                                      const RatExp& precision_match)
{
    return separate_orbits(
        roots, [&](const PuiseuxRoot& r) { return step(r.series); },
        [](const PuiseuxSeries& img, const PuiseuxRoot& cand) { return match_valuation(img, cand.series); },
        precision_match);
}

} // namespace nadyn
