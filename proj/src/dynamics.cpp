#include "nadyn/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace nadyn {

const char* cycle_class_name(CycleClass c)
{
    switch (c) {
    case CycleClass::Repelling:
        return "repelling";
    case CycleClass::Indifferent:
        return "indifferent";
    case CycleClass::Attracting:
        return "attracting";
    }
    return "?";
}

void validate_family(const RationalMap& f)
{
    if (f.degree() < 2) {
        throw Error(ErrorCode::InvalidFamily, "degree must be at least 2");
    }
    if (degree(f.p()) < f.degree() && degree(f.q()) < f.degree()) {
        throw Error(ErrorCode::InvalidFamily, "numerator and denominator share the root at infinity");
    }
    // Common roots at a sample parameter; a shared factor shows up at every t.
    const Complex t0 = std::polar(0.0123, 0.71);
    const ComplexRationalMap g = specialize(f, t0);
    const ComplexPoly p = trimmed(g.p());
    const ComplexPoly q = trimmed(g.q());
    const ComplexPoly& small = p.size() <= q.size() ? p : q;
    const ComplexPoly& other = p.size() <= q.size() ? q : p;
    if (degree(small) < 1) {
        return;
    }
    for (const Complex& r : aberth_roots(small)) {
        double mass = 0.0;
        for (std::size_t k = other.size(); k-- > 0;) {
            mass = mass * std::abs(r) + std::abs(other[k]);
        }
        if (std::abs(horner(other, r)) <= 1e-9 * mass) {
            throw Error(ErrorCode::InvalidFamily, "numerator and denominator share a root");
        }
    }
}

SeriesPoly fixed_equation(const RationalMap& f, int n, std::size_t budget)
{
    return fixed_form(iterate(f, n, budget), Chart::Affine);
}

namespace {

std::vector<PeriodicPoint> solve_chart(const SeriesPoly& eq, Chart chart, const DynamicsOptions& options)
{
    std::vector<PeriodicPoint> out;
    if (degree(eq) < 1) {
        return out;
    }
    PuiseuxOptions po;
    po.precision = options.precision;
    po.ramification_cap = options.ramification_cap;
    po.aberth = options.aberth;
    po.region = chart == Chart::Affine ? RootRegion::NonNegative : RootRegion::Positive;
    for (auto& r : puiseux_roots(eq, po)) {
        out.push_back({{chart, std::move(r.series)}, r.multiplicity});
    }
    return out;
}

// Finer than any gap between exponents with denominators up to 2^12.
const RatExp kSeparationStep(1, std::int64_t{1} << 24);

// Sentinel below any genuine valuation: points in different charts never match.
const Valuation kApart(RatExp(std::numeric_limits<std::int32_t>::min()));

Valuation closeness(const SeriesPoint& a, const SeriesPoint& b)
{
    if (a.chart != b.chart) {
        return kApart;
    }
    return match_valuation(a.coord, b.coord);
}

// Distance in the unit circle to the nearest primitive q-th root of unity.
double primitive_root_distance(Complex c, int q)
{
    double best = std::numeric_limits<double>::infinity();
    for (int j = 1; j <= q; ++j) {
        if (std::gcd(j, q) == 1) {
            best = std::min(best, std::abs(c - std::polar(1.0, 2.0 * M_PI * j / q)));
        }
    }
    return best;
}

CycleClass classify(const Valuation& v)
{
    if (v.is_infinite() || RatExp(0) < v.value()) {
        return CycleClass::Attracting;
    }
    return v.value() < RatExp(0) ? CycleClass::Repelling : CycleClass::Indifferent;
}

} // namespace

std::vector<PeriodicPoint> periodic_points(const RationalMap& f, int n, const DynamicsOptions& options)
{
    const RationalMap fn = iterate(f, n, options.size_budget);
    std::vector<PeriodicPoint> pts = solve_chart(fixed_form(fn, Chart::Affine), Chart::Affine, options);
    for (auto& p : solve_chart(fixed_form(fn, Chart::Flipped), Chart::Flipped, options)) {
        pts.push_back(std::move(p));
    }
    int total = 0;
    for (const auto& p : pts) {
        total += p.multiplicity;
    }
    if (total != fn.degree() + 1) {
        throw Error(ErrorCode::ClusterAmbiguity, "period-" + std::to_string(n) + " points total " + std::to_string(total)
                                                     + " instead of " + std::to_string(fn.degree() + 1));
    }
    return pts;
}

PuiseuxSeries multiplier(const RationalMap& f, const std::vector<SeriesPoint>& orbit)
{
    return cycle_multiplier(f, orbit);
}

std::vector<CycleRecord> periodic_cycles(const RationalMap& f, int n, const DynamicsOptions& options)
{
    if (n < 1 || n > options.n_max) {
        throw Error(ErrorCode::PreconditionFailed, "period " + std::to_string(n) + " outside 1.." + std::to_string(options.n_max));
    }
    const std::vector<PeriodicPoint> pts = periodic_points(f, n, options);
    const std::size_t count = pts.size();

    std::vector<SeriesPoint> images;
    images.reserve(count);
    std::optional<RatExp> min_order;
    for (const auto& p : pts) {
        images.push_back(image(f, p.point));
        if (const auto& o = images.back().coord.order()) {
            min_order = min_order ? min(*min_order, *o) : *o;
        }
    }
    // Distinct points separate at or below max_sep, so an image matches its
    // target strictly beyond it. Images must carry precision past max_sep.
    std::optional<RatExp> max_sep;
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t j = i + 1; j < count; ++j) {
            const Valuation v = closeness(pts[i].point, pts[j].point);
            if (v != kApart && !v.is_infinite()) {
                max_sep = max_sep ? max(*max_sep, v.value()) : v.value();
            }
        }
    }
    RatExp threshold(0);
    if (max_sep) {
        if (min_order && !(*max_sep < *min_order)) {
            throw Error(ErrorCode::MatchAmbiguity, "periodic points not separated within the working precision");
        }
        threshold = *max_sep + kSeparationStep;
    } else if (min_order) {
        threshold = *min_order - RatExp(1);
    }

    std::vector<std::size_t> index(count);
    std::iota(index.begin(), index.end(), 0);
    const auto groups = separate_orbits(
        index, [&](std::size_t i) { return images[i]; },
        [&](const SeriesPoint& img, std::size_t j) { return closeness(img, pts[j].point); }, threshold);

    std::vector<CycleRecord> cycles;
    for (const auto& g : groups) {
        const int m = static_cast<int>(g.size());
        if (n % m != 0) {
            throw Error(ErrorCode::MatchFailure, "orbit of length " + std::to_string(m) + " in period " + std::to_string(n));
        }
        CycleRecord rec;
        rec.period = n;
        rec.exact_period = m;
        std::vector<SeriesPoint> orbit;
        int total = 0;
        for (std::size_t i : g) {
            rec.points.push_back(pts[i]);
            orbit.push_back(pts[i].point);
            total += pts[i].multiplicity;
        }
        rec.multiplier = multiplier(f, orbit);
        rec.multiplier_valuation = rec.multiplier.valuation();
        if (rec.multiplier.is_zero() && rec.multiplier.order()) {
            rec.multiplier_valuation = Valuation(*rec.multiplier.order());
        }
        rec.cycle_class = classify(rec.multiplier_valuation);

        if (m == n) {
            if (total % n != 0) {
                throw Error(ErrorCode::FormalCycleAmbiguity, "unequal multiplicities along a cycle");
            }
            rec.formal_count = total / n;
        } else if (rec.multiplier_valuation == Valuation(RatExp(0))) {
            const int q = n / m;
            const double dist = primitive_root_distance(rec.multiplier.coefficient(RatExp(0)), q);
            const double tol = options.root_of_unity_tolerance;
            if (dist <= tol) {
                if ((total - m) % n != 0 || total == m) {
                    throw Error(ErrorCode::FormalCycleAmbiguity,
                                "multiplier is a primitive root of unity but multiplicities do not fit");
                }
                rec.formal_count = (total - m) / n;
            } else if (dist <= 10.0 * tol) {
                throw Error(ErrorCode::FormalCycleAmbiguity, "multiplier within the root-of-unity tolerance band");
            }
        }
        cycles.push_back(std::move(rec));
    }
    std::stable_sort(cycles.begin(), cycles.end(), [](const CycleRecord& a, const CycleRecord& b) {
        if (a.exact_period != b.exact_period) {
            return a.exact_period < b.exact_period;
        }
        return a.multiplier_valuation < b.multiplier_valuation;
    });
    return cycles;
}

RatExp blow_up_exponent(const CycleRecord& cycle)
{
    const Valuation& v = cycle.multiplier_valuation;
    if (v.is_infinite() || !(v.value() < RatExp(0))) {
        return RatExp(0);
    }
    return -v.value() / RatExp(cycle.exact_period);
}

int formal_cycle_count(const std::vector<CycleRecord>& cycles)
{
    int c = 0;
    for (const auto& r : cycles) {
        c += r.formal_count;
    }
    return c;
}

RatExp lyap_na_estimate(const std::vector<CycleRecord>& cycles, int degree, int n)
{
    RatExp sum(0);
    for (const auto& c : cycles) {
        int mult = 0;
        for (const auto& p : c.points) {
            mult += p.multiplicity;
        }
        sum = sum + blow_up_exponent(c) * RatExp(mult);
    }
    std::int64_t dn = 1;
    for (int k = 0; k < n; ++k) {
        dn *= degree;
    }
    return sum / RatExp(dn);
}

RatExp lyap_na_estimate(const RationalMap& f, int n, const DynamicsOptions& options)
{
    return lyap_na_estimate(periodic_cycles(f, n, options), f.degree(), n);
}

const std::vector<CycleRecord>& CycleCache::cycles(int n)
{
    auto it = cache_.find(n);
    if (it == cache_.end()) {
        it = cache_.emplace(n, periodic_cycles(f_, n, options_)).first;
    }
    return it->second;
}

} // namespace nadyn
