#include "nadyn/berkovich.hpp"

#include <algorithm>
#include <cmath>

#include "nadyn/complex_roots.hpp"

namespace nadyn {

namespace {

// Coefficients at or below this size relative to the input scale are
// treated as cancellation residue.
constexpr double kResidue = 1e-10;

// Smallest exponent carrying a significant term, or nullopt when the series
// is zero to its truncation.
std::optional<RatExp> significant_valuation(const PuiseuxSeries& s, double tol)
{
    for (const auto& t : s.terms()) {
        if (std::abs(t.coef) > tol) {
            return t.exp;
        }
    }
    return std::nullopt;
}

double coefficient_scale(const SeriesPoly& p)
{
    double m = 1.0;
    for (const auto& c : p) {
        m = std::max(m, c.max_abs_coefficient());
    }
    return m;
}

// Gauss valuation min_k val(a_k), guarded against truncation.
RatExp gauss_valuation(const SeriesPoly& p, double tol)
{
    std::optional<RatExp> v;
    std::optional<RatExp> known;
    for (const auto& c : p) {
        if (const auto e = significant_valuation(c, tol)) {
            v = v ? min(*v, *e) : *e;
        }
        known = min_order(known, c.order());
    }
    if (!v) {
        throw Error(ErrorCode::TruncationExhausted, "polynomial vanishes to its truncation order");
    }
    if (known && !(*v < *known)) {
        throw Error(ErrorCode::TruncationExhausted, "Gauss norm not determined below the truncation order");
    }
    return *v;
}

ComplexPoly leading_part(const SeriesPoly& p, const RatExp& v, double tol)
{
    ComplexPoly r(p.size(), Complex(0.0, 0.0));
    for (std::size_t k = 0; k < p.size(); ++k) {
        const Complex c = p[k].coefficient(v);
        if (std::abs(c) > tol) {
            r[k] = c;
        }
    }
    return trimmed(r);
}

// lambda with r = lambda q up to relative noise, if any.
std::optional<Complex> proportional(const ComplexPoly& r, const ComplexPoly& q)
{
    std::size_t piv = 0;
    double best = 0.0;
    for (std::size_t k = 0; k < q.size(); ++k) {
        if (std::abs(q[k]) > best) {
            best = std::abs(q[k]);
            piv = k;
        }
    }
    if (best == 0.0 || piv >= r.size()) {
        return std::nullopt;
    }
    const Complex lambda = r[piv] / q[piv];
    double scale = 0.0;
    for (const auto& c : r) {
        scale = std::max(scale, std::abs(c));
    }
    const std::size_t n = std::max(r.size(), q.size());
    for (std::size_t k = 0; k < n; ++k) {
        const Complex rk = k < r.size() ? r[k] : Complex(0.0, 0.0);
        const Complex qk = k < q.size() ? q[k] : Complex(0.0, 0.0);
        if (std::abs(rk - lambda * qk) > 1e-9 * scale) {
            return std::nullopt;
        }
    }
    return lambda;
}

struct GaussImage {
    PuiseuxSeries center;
    RatExp rho;
    SeriesPoly residual; // P - center * Q
    RatExp residual_valuation;
    RatExp q_valuation;
    double tol = 0.0;
};

// Image of the Gauss point under h = P/Q: greedy removal of constant
// leading parts from P - cQ.
GaussImage gauss_image(const RationalMap& h)
{
    const SeriesPoly& q = h.q();
    GaussImage g;
    g.tol = kResidue * std::max(coefficient_scale(h.p()), coefficient_scale(q));
    g.q_valuation = gauss_valuation(q, g.tol);
    const ComplexPoly q_lead = leading_part(q, g.q_valuation, g.tol);
    g.residual = h.p();
    for (int step = 0; step < 256; ++step) {
        bool vanished = true;
        for (const auto& c : g.residual) {
            if (significant_valuation(c, g.tol)) {
                vanished = false;
                break;
            }
        }
        if (vanished && std::all_of(g.residual.begin(), g.residual.end(),
                                    [](const PuiseuxSeries& c) { return c.is_exact(); })) {
            throw Error(ErrorCode::PreconditionFailed, "constant map has a rigid image");
        }
        g.residual_valuation = gauss_valuation(g.residual, g.tol);
        g.rho = g.residual_valuation - g.q_valuation;
        const ComplexPoly r_lead = leading_part(g.residual, g.residual_valuation, g.tol);
        const auto lambda = proportional(r_lead, q_lead);
        if (!lambda) {
            return g;
        }
        const PuiseuxSeries c = PuiseuxSeries::monomial(*lambda, g.rho);
        g.center = add(g.center, c);
        g.residual = poly_add(g.residual, poly_scale(q, neg(c)));
        // Exact cancellation of the leading part, whatever rounding left.
        for (auto& coef : g.residual) {
            std::vector<Term> kept;
            for (const auto& t : coef.terms()) {
                if (t.exp != g.residual_valuation) {
                    kept.push_back(t);
                }
            }
            coef = PuiseuxSeries(std::move(kept), coef.order());
        }
    }
    throw Error(ErrorCode::TruncationExhausted, "Gauss-norm cancellation did not settle");
}

// Removes the common complex roots of p and q.
void cancel_common_factors(ComplexPoly& p, ComplexPoly& q)
{
    p = trimmed(p);
    q = trimmed(q);
    auto near_zero = [](const ComplexPoly& a, std::size_t k) {
        double s = 0.0;
        for (const auto& c : a) {
            s = std::max(s, std::abs(c));
        }
        return std::abs(a[k]) <= 1e-12 * s;
    };
    while (p.size() > 1 && q.size() > 1 && near_zero(p, 0) && near_zero(q, 0)) {
        p.erase(p.begin());
        q.erase(q.begin());
    }
    if (degree(p) < 1 || degree(q) < 1) {
        return;
    }
    const auto pc = cluster_roots(p, aberth_roots(p));
    const auto qc = cluster_roots(q, aberth_roots(q));
    auto deflate = [](ComplexPoly& a, Complex r) {
        ComplexPoly b(a.size() - 1);
        Complex carry = 0.0;
        for (std::size_t k = a.size(); k-- > 1;) {
            carry = a[k] + carry * r;
            b[k - 1] = carry;
        }
        a = b;
    };
    std::vector<char> used(qc.size(), 0);
    for (const auto& a : pc) {
        for (std::size_t j = 0; j < qc.size(); ++j) {
            if (used[j] || std::abs(a.center - qc[j].center) > 1e-6 * std::max(1.0, std::abs(a.center))) {
                continue;
            }
            used[j] = 1;
            const int m = std::min(a.multiplicity, qc[j].multiplicity);
            const Complex r = 0.5 * (a.center + qc[j].center);
            for (int i = 0; i < m; ++i) {
                deflate(p, r);
                deflate(q, r);
            }
            break;
        }
    }
}

PuiseuxSeries to_affine(const SeriesPoint& x)
{
    return x.chart == Chart::Affine ? x.coord : inv(x.coord);
}

bool is_infinity(const SeriesPoint& x) { return x.chart == Chart::Flipped && x.coord.is_zero(); }

} // namespace

TypeIIPoint::TypeIIPoint(PuiseuxSeries center, RatExp rho) : rho_(rho)
{
    std::vector<Term> kept;
    for (const auto& t : center.terms()) {
        if (t.exp < rho) {
            kept.push_back(t);
        }
    }
    std::optional<RatExp> order = center.order();
    if (order && !(*order < rho)) {
        order.reset();
    }
    center_ = PuiseuxSeries(std::move(kept), order);
}

bool TypeIIPoint::contains(const PuiseuxSeries& z) const
{
    const PuiseuxSeries d = sub(z, center_);
    for (const auto& t : d.terms()) {
        const double scale = std::max({1.0, std::abs(z.coefficient(t.exp)), std::abs(center_.coefficient(t.exp))});
        if (std::abs(t.coef) > 1e-8 * scale) {
            return !(t.exp < rho_);
        }
    }
    if (d.order() && *d.order() < rho_) {
        throw Error(ErrorCode::BoundaryAmbiguity, "point and ball boundary agree to the truncation order");
    }
    return true;
}

std::string TypeIIPoint::to_string() const
{
    return "zeta(" + center_.to_string() + ", e^(" + (-rho_).to_string() + "))";
}

bool operator==(const TypeIIPoint& a, const TypeIIPoint& b)
{
    if (a.rho_ != b.rho_) {
        return false;
    }
    const Valuation v = match_valuation(a.center_, b.center_);
    return v >= Valuation(a.rho_);
}

TypeIIPoint join(const TypeIIPoint& x, const TypeIIPoint& y)
{
    RatExp rho = min(x.rho(), y.rho());
    const Valuation v = match_valuation(x.center(), y.center());
    if (!v.is_infinite()) {
        rho = min(rho, v.value());
    }
    return TypeIIPoint(x.center(), rho);
}

RatExp hyperbolic_distance(const TypeIIPoint& x, const TypeIIPoint& y)
{
    const RatExp j = join(x, y).rho();
    return (x.rho() - j) + (y.rho() - j);
}

RationalMap conjugate_to_gauss(const RationalMap& f, const TypeIIPoint& x, std::int64_t ramification_cap)
{
    if (x.rho().den() > ramification_cap || x.center().ramification() > ramification_cap) {
        throw Error(ErrorCode::RamificationCapExceeded, "type II point " + x.to_string() + " exceeds ramification cap");
    }
    if (x == TypeIIPoint::gauss()) {
        return f;
    }
    const Mobius m{PuiseuxSeries::monomial(1.0, x.rho()), x.center(), PuiseuxSeries(), PuiseuxSeries(1.0)};
    return compose(f, m.as_map());
}

ImagePoint image_point(const RationalMap& f, const TypeIIPoint& x)
{
    const GaussImage g = gauss_image(conjugate_to_gauss(f, x));
    ImagePoint out{TypeIIPoint(g.center, g.rho), false};
    out.beyond_gauss = !(TypeIIPoint::gauss() == join(out.point, TypeIIPoint::gauss()));
    return out;
}

ReducedMap reduce_at(const RationalMap& f, const TypeIIPoint& x)
{
    const RationalMap h = conjugate_to_gauss(f, x);
    const GaussImage g = gauss_image(h);
    // (P - cQ) / (t^rho Q): both have Gauss valuation val(P - cQ).
    ReducedMap r;
    r.p = leading_part(g.residual, g.residual_valuation, g.tol);
    r.q = leading_part(h.q(), g.q_valuation, g.tol);
    cancel_common_factors(r.p, r.q);
    r.degree = std::max(degree(r.p), degree(r.q));
    return r;
}

int local_degree(const RationalMap& f, const TypeIIPoint& x) { return reduce_at(f, x).degree; }

bool has_good_reduction(const RationalMap& f)
{
    const TypeIIPoint xg = TypeIIPoint::gauss();
    return image_point(f, xg).point == xg && local_degree(f, xg) == f.degree();
}

const char* pgr_outcome_name(PgrOutcome o)
{
    switch (o) {
    case PgrOutcome::NotPgr: return "NOT-PGR";
    case PgrOutcome::Pgr: return "PGR";
    case PgrOutcome::Inconclusive: return "INCONCLUSIVE";
    }
    return "?";
}

PgrCertificate potential_good_reduction_search(const RationalMap& f, const PgrOptions& options)
{
    CycleCache cache(f, options.dynamics);
    return potential_good_reduction_search(cache, options);
}

PgrCertificate potential_good_reduction_search(CycleCache& cache, const PgrOptions& options)
{
    const RationalMap& f = cache.map();
    PgrCertificate cert;
    auto repelling_at = [&](int n) -> bool {
        for (const auto& c : cache.cycles(n)) {
            if (!c.multiplier_valuation.is_infinite() && c.multiplier_valuation.value() < RatExp(0)) {
                cert.outcome = PgrOutcome::NotPgr;
                cert.cycle = c;
                return true;
            }
        }
        return false;
    };
    if (options.max_period >= 1 && repelling_at(1)) {
        return cert;
    }

    std::vector<TypeIIPoint> candidates;
    auto push = [&](const TypeIIPoint& x) {
        if (std::find(candidates.begin(), candidates.end(), x) == candidates.end()) {
            candidates.push_back(x);
        }
    };
    std::vector<TypeIIPoint> orbit{TypeIIPoint::gauss()};
    for (int k = 1; k < options.budget; ++k) {
        try {
            orbit.push_back(image_point(f, orbit.back()).point);
        } catch (const Error&) {
            break;
        }
    }
    for (const auto& x : orbit) {
        push(x);
    }
    for (std::size_t i = 0; i < orbit.size(); ++i) {
        for (std::size_t j = i + 1; j < orbit.size(); ++j) {
            for (std::size_t k = j + 1; k < orbit.size(); ++k) {
                // The median of three points is the deepest pairwise join.
                TypeIIPoint m = join(orbit[i], orbit[j]);
                for (const auto& c : {join(orbit[j], orbit[k]), join(orbit[i], orbit[k])}) {
                    if (m.rho() < c.rho()) {
                        m = c;
                    }
                }
                push(m);
            }
        }
    }
    std::vector<PuiseuxSeries> special;
    try {
        for (const auto& p : periodic_points(f, 1, cache.options())) {
            if (!is_infinity(p.point)) {
                special.push_back(to_affine(p.point));
            }
        }
        SeriesPoly crit = trimmed(poly_add(poly_mul(derivative(f.p()), f.q()), poly_scale(poly_mul(f.p(), derivative(f.q())), PuiseuxSeries(-1.0))));
        if (degree(crit) >= 1) {
            for (const auto& r : puiseux_roots(crit, PuiseuxOptions{})) {
                special.push_back(r.series);
            }
        }
    } catch (const Error&) {
    }
    for (std::size_t i = 0; i < special.size(); ++i) {
        for (std::size_t j = i + 1; j < special.size(); ++j) {
            const Valuation v = match_valuation(special[i], special[j]);
            if (!v.is_infinite()) {
                push(TypeIIPoint(special[i], v.value()));
            }
        }
    }

    const int d = f.degree();
    for (const auto& x : candidates) {
        ++cert.candidates_tested;
        try {
            if (image_point(f, x).point == x && local_degree(f, x) == d) {
                cert.outcome = PgrOutcome::Pgr;
                cert.point = x;
                return cert;
            }
        } catch (const Error&) {
        }
    }
    for (int n = 2; n <= options.max_period; ++n) {
        if (repelling_at(n)) {
            return cert;
        }
    }
    return cert;
}

RayFixedPoint fixed_type_II_on_ray(const RationalMap& f, const PuiseuxSeries& x0)
{
    if (!f.is_polynomial()) {
        throw Error(ErrorCode::PreconditionFailed, "ray search needs a polynomial family");
    }
    const PuiseuxSeries q0inv = inv(f.q()[0]);
    const SeriesPoly c = taylor_shift(poly_scale(trimmed(f.p()), q0inv), x0);
    const double tol = kResidue * coefficient_scale(c);
    auto val_of = [&](std::size_t k) -> std::optional<RatExp> { return significant_valuation(c[k], tol); };

    const auto v1 = val_of(1);
    if (v1 && *v1 < RatExp(0)) {
        throw Error(ErrorCode::NoBreakpoint, "fixed point is repelling; balls about it expand");
    }
    std::optional<RatExp> rho;
    for (std::size_t k = 2; k < c.size(); ++k) {
        if (const auto v = val_of(k)) {
            const RatExp r = -*v / RatExp(static_cast<std::int64_t>(k - 1));
            rho = rho ? max(*rho, r) : r;
        }
    }
    if (!rho) {
        throw Error(ErrorCode::NoBreakpoint, "no nonlinear Taylor term");
    }
    int deg = 1;
    for (std::size_t k = 1; k < c.size(); ++k) {
        if (const auto v = val_of(k)) {
            if (*v + *rho * RatExp(static_cast<std::int64_t>(k)) == *rho) {
                deg = static_cast<int>(k);
            }
        }
    }
    const TypeIIPoint x(x0, *rho);
    const PuiseuxSeries drift = sub(c[0], x0);
    const double scale = std::max({1.0, x0.max_abs_coefficient(), c[0].max_abs_coefficient()});
    if (significant_valuation(drift, 1e-8 * scale)) {
        throw Error(ErrorCode::PreconditionFailed, "x0 is not fixed to the precision of the ray point");
    }
    return {x, deg};
}

namespace {

int count_in_ball(const SeriesPoly& poly, const TypeIIPoint& x, const DynamicsOptions& options)
{
    const SeriesPoly p = trimmed(poly);
    if (degree(p) < 1) {
        return 0;
    }
    PuiseuxOptions po;
    po.precision = options.precision;
    po.ramification_cap = options.ramification_cap;
    po.aberth = options.aberth;
    int count = 0;
    for (const auto& r : puiseux_roots(p, po)) {
        if (x.contains(r.series)) {
            count += r.multiplicity;
        }
    }
    return count;
}

} // namespace

int count_fixed_in_ball(const RationalMap& f, const TypeIIPoint& x, int n, const DynamicsOptions& options)
{
    return count_in_ball(fixed_equation(f, n, options.size_budget), x, options);
}

int count_critical_in_ball(const RationalMap& f, const TypeIIPoint& x, const DynamicsOptions& options)
{
    const SeriesPoly crit = poly_add(poly_mul(derivative(f.p()), f.q()),
                                     poly_scale(poly_mul(f.p(), derivative(f.q())), PuiseuxSeries(-1.0)));
    return count_in_ball(crit, x, options);
}

} // namespace nadyn
