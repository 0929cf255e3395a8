#include "nadyn/spectra.hpp"

#include <algorithm>
#include <cmath>

namespace nadyn {

namespace {

bool at_infinity(const SeriesPoint& p) { return p.chart == Chart::Flipped && p.coord.is_zero(); }

bool has_pole(const CycleRecord& c)
{
    return !c.multiplier_valuation.is_infinite() && c.multiplier_valuation.value() < RatExp(0);
}

std::int64_t ipow(std::int64_t b, int e)
{
    std::int64_t r = 1;
    for (int i = 0; i < e; ++i) {
        r *= b;
    }
    return r;
}

std::optional<PuiseuxSeries> finite_coordinate(const SeriesPoint& p)
{
    if (at_infinity(p)) {
        return std::nullopt;
    }
    return p.chart == Chart::Affine ? p.coord : inv(p.coord);
}

} // namespace

PuiseuxSeries multiplier_of_iterate(const CycleRecord& cycle, int n)
{
    const int k = n / cycle.exact_period;
    return k == 1 ? cycle.multiplier : pow(cycle.multiplier, static_cast<unsigned>(k));
}

std::vector<PuiseuxSeries> elementary_symmetric(const std::vector<PuiseuxSeries>& values)
{
    // Coefficients of prod (1 + mu X).
    std::vector<PuiseuxSeries> e{PuiseuxSeries(1.0)};
    for (const auto& mu : values) {
        e.emplace_back();
        for (std::size_t k = e.size() - 1; k >= 1; --k) {
            e[k] = add(e[k], mul(mu, e[k - 1]));
        }
    }
    e.erase(e.begin());
    return e;
}

SpectrumReport lambda_spectrum(CycleCache& cache, int n, bool exclude_infinity)
{
    SpectrumReport r;
    r.period = n;
    r.excludes_infinity = exclude_infinity && n == 1;
    for (const auto& c : cache.cycles(n)) {
        if (!c.formal()) {
            continue;
        }
        if (r.excludes_infinity && std::any_of(c.points.begin(), c.points.end(),
                                               [](const PeriodicPoint& p) { return at_infinity(p.point); })) {
            continue;
        }
        const PuiseuxSeries mu = multiplier_of_iterate(c, n);
        const Valuation v = mu.valuation();
        for (int k = 0; k < c.formal_count; ++k) {
            r.multipliers.push_back(mu);
            r.pole_flags.push_back(!v.is_infinite() && v.value() < RatExp(0));
        }
    }
    r.symmetric_functions = elementary_symmetric(r.multipliers);
    return r;
}

SpectrumReport lambda_spectrum(const RationalMap& f, int n, bool exclude_infinity, const DynamicsOptions& options)
{
    CycleCache cache(f, options);
    return lambda_spectrum(cache, n, exclude_infinity);
}

std::optional<BlowUpWitness> detect_blow_up(CycleCache& cache, int n_max)
{
    for (int n = 1; n <= n_max; ++n) {
        const auto& cycles = cache.cycles(n);
        // Most negative valuation first; records are already in a canonical order.
        const CycleRecord* best = nullptr;
        for (const auto& c : cycles) {
            if (c.exact_period == n && has_pole(c) &&
                (!best || c.multiplier_valuation < best->multiplier_valuation)) {
                best = &c;
            }
        }
        if (best) {
            return BlowUpWitness{n, *best};
        }
    }
    return std::nullopt;
}

std::optional<BlowUpWitness> detect_blow_up(const RationalMap& f, int n_max, const DynamicsOptions& options)
{
    CycleCache cache(f, options);
    return detect_blow_up(cache, n_max);
}

const char* verdict_name(Verdict v)
{
    switch (v) {
    case Verdict::Verified: return "verified";
    case Verdict::CounterexampleCandidate: return "counterexample-candidate";
    case Verdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

namespace {

TheoremCertificate certify(std::string theorem, CycleCache& cache, int bound, int search_to, const CheckOptions& options)
{
    TheoremCertificate cert;
    cert.theorem = std::move(theorem);
    cert.period_bound = bound;
    cert.witness = detect_blow_up(cache, search_to);
    cert.pgr = potential_good_reduction_search(cache, options.pgr);
    if (cert.witness && cert.witness->period <= bound) {
        cert.verdict = Verdict::Verified;
    } else if (cert.pgr.outcome == PgrOutcome::Pgr) {
        cert.verdict = Verdict::Verified;
        cert.vacuous = true;
        cert.notes.emplace_back("potential good reduction: the statement is vacuous");
    } else {
        cert.verdict = Verdict::CounterexampleCandidate;
        cert.notes.emplace_back(cert.witness ? "first blow-up exceeds the period bound"
                                             : "no blow-up witness and no good-reduction point found");
    }
    return cert;
}

Period2Audit period2_audit(CycleCache& cache)
{
    const RationalMap& f = cache.map();
    Period2Audit a;
    for (const auto& c : cache.cycles(1)) {
        if (has_pole(c)) {
            continue;
        }
        const auto z = finite_coordinate(c.points.front().point);
        if (!z) {
            continue;
        }
        try {
            const RayFixedPoint r = fixed_type_II_on_ray(f, *z);
            if (r.local_degree < 2 ||
                std::any_of(a.fixed_points.begin(), a.fixed_points.end(),
                            [&](const BallAuditEntry& e) { return e.point == r.point; })) {
                continue;
            }
            BallAuditEntry e{r.point, local_degree(f, r.point), 0, 0};
            e.fixed_in_ball = count_fixed_in_ball(f, r.point, 1, cache.options());
            e.critical_in_ball = count_critical_in_ball(f, r.point, cache.options());
            a.balls_consistent = a.balls_consistent && e.fixed_in_ball == e.local_degree &&
                                 e.critical_in_ball == e.local_degree - 1;
            a.fixed_points.push_back(e);
        } catch (const Error& err) {
            a.notes.emplace_back(std::string("fixed ray at ") + z->to_string() + ": " + err.what());
        }
    }

    const RationalMap f2 = iterate(f, 2, cache.options().size_budget);
    for (const auto& c : cache.cycles(2)) {
        if (c.exact_period != 2 || has_pole(c)) {
            continue;
        }
        const auto z = finite_coordinate(c.points.front().point);
        if (!z) {
            continue;
        }
        try {
            const TypeIIPoint w = fixed_type_II_on_ray(f2, *z).point;
            const TypeIIPoint fw = image_point(f, w).point;
            if (fw == w) {
                continue;
            }
            const bool seen = std::any_of(a.two_cycles.begin(), a.two_cycles.end(), [&](const TwoCycleAuditEntry& e) {
                return e.point == w || e.point == fw;
            });
            if (seen) {
                continue;
            }
            TwoCycleAuditEntry e{w, fw, local_degree(f, w), local_degree(f, fw)};
            if (e.mu_plus * e.mu_minus < 2) {
                continue;
            }
            if (e.mu_plus < e.mu_minus) {
                std::swap(e.point, e.image);
                std::swap(e.mu_plus, e.mu_minus);
            }
            a.two_cycles.push_back(e);
        } catch (const Error& err) {
            a.notes.emplace_back(std::string("2-periodic ray at ") + z->to_string() + ": " + err.what());
        }
    }

    const int n = static_cast<int>(a.fixed_points.size());
    for (const auto& e : a.two_cycles) {
        a.sum_excess += e.mu_plus + e.mu_minus - 2;
        a.sum_product += e.mu_plus * e.mu_minus;
    }
    a.excess_bound = n - 1;
    a.product_bound = 2 * n * (n - 1);
    a.excess_within_bound = a.sum_excess <= a.excess_bound;
    a.product_above_bound = a.sum_product >= a.product_bound;
    return a;
}

} // namespace

TheoremCertificate check_period2(const RationalMap& f, const CheckOptions& options)
{
    if (!f.is_polynomial()) {
        throw Error(ErrorCode::PreconditionFailed, "period2 applies to polynomial families");
    }
    CycleCache cache(f, options.dynamics);
    TheoremCertificate cert = certify("period2", cache, f.degree() <= 3 ? 1 : 2, 2, options);
    cert.audit = period2_audit(cache);
    return cert;
}

TheoremCertificate check_period3(const RationalMap& f, const CheckOptions& options)
{
    if (f.degree() != 3) {
        throw Error(ErrorCode::PreconditionFailed, "period3 applies to cubic families");
    }
    CycleCache cache(f, options.dynamics);
    return certify("period3", cache, 3, 3, options);
}

TheoremCertificate check_main2(const RationalMap& f, const CheckOptions& options)
{
    const int d = f.degree();
    int bound = 0;
    if (d == 2 || (d == 3 && f.is_polynomial())) {
        bound = 1;
    } else if (f.is_polynomial()) {
        bound = 2;
    } else if (d == 3) {
        bound = 3;
    }
    CycleCache cache(f, options.dynamics);
    if (bound == 0) {
        TheoremCertificate cert = certify("main2", cache, 3, 3, options);
        cert.period_bound = 0;
        if (cert.verdict != Verdict::Verified || !cert.vacuous) {
            cert.verdict = Verdict::Inconclusive;
        }
        cert.notes.emplace_back("no period bound is asserted for this class of families");
        return cert;
    }
    return certify("main2", cache, bound, bound, options);
}

TheoremCertificate check_dichotomy(const RationalMap& f, int n_max, const CheckOptions& options)
{
    CycleCache cache(f, options.dynamics);
    TheoremCertificate cert;
    cert.theorem = "dichotomy";
    cert.period_bound = n_max;
    cert.witness = detect_blow_up(cache, n_max);
    bool consistent = true;
    for (int n = 1; n <= n_max; ++n) {
        const auto& cycles = cache.cycles(n);
        const bool pole = std::any_of(cycles.begin(), cycles.end(), has_pole);
        const RatExp lyap = lyap_na_estimate(cycles, f.degree(), n);
        cert.notes.push_back("n=" + std::to_string(n) + " pole=" + (pole ? "yes" : "no") + " lyap=" + lyap.to_string());
        consistent = consistent && (pole == (RatExp(0) < lyap));
    }
    cert.pgr = potential_good_reduction_search(cache, options.pgr);
    cert.verdict = consistent ? Verdict::Verified : Verdict::CounterexampleCandidate;
    return cert;
}

Main5Report check_main5_fraction(CycleCache& cache, int n, double a, int lambda_period)
{
    const int d = cache.map().degree();
    Main5Report r;
    r.period = n;
    r.lambda = lyap_na_estimate(cache.cycles(lambda_period), d, lambda_period);
    if (!(RatExp(0) < r.lambda)) {
        throw Error(ErrorCode::PreconditionFailed, "Lyapunov estimate vanishes; the fraction bound does not apply");
    }
    r.log_a = std::log(a);
    const double threshold = n * r.lambda.to_double() / 2.0 + r.log_a;
    for (const auto& c : cache.cycles(n)) {
        if (c.multiplier_valuation.is_infinite()) {
            continue;
        }
        const RatExp v = c.multiplier_valuation.value() * RatExp(n / c.exact_period);
        if (-v.to_double() >= threshold - 1e-12) {
            for (const auto& p : c.points) {
                r.qualifying += p.multiplicity;
            }
        }
    }
    r.fraction = std::min(1.0, static_cast<double>(r.qualifying) / static_cast<double>(ipow(d, n)));
    return r;
}

MilnorReport milnor_quadratic_check(const RationalMap& f, const DynamicsOptions& options, double tolerance)
{
    if (f.degree() != 2) {
        throw Error(ErrorCode::PreconditionFailed, "the Milnor relation concerns quadratic maps");
    }
    const SpectrumReport s = lambda_spectrum(f, 1, false, options);
    if (s.multipliers.size() != 3) {
        throw Error(ErrorCode::FormalCycleAmbiguity, "expected three fixed multipliers");
    }
    MilnorReport r;
    r.multipliers = s.multipliers;
    r.sigma1 = s.symmetric_functions[0];
    r.sigma2 = s.symmetric_functions[1];
    r.sigma3 = s.symmetric_functions[2];
    const PuiseuxSeries defect = add(sub(r.sigma3, r.sigma1), PuiseuxSeries(2.0));
    const double scale = std::max({1.0, r.sigma1.max_abs_coefficient(), r.sigma3.max_abs_coefficient()});
    r.relation_defect = defect.max_abs_coefficient() / scale;
    r.relation_holds = r.relation_defect <= tolerance;
    r.degenerate = std::any_of(s.pole_flags.begin(), s.pole_flags.end(), [](bool b) { return b; });
    return r;
}

} // namespace nadyn
