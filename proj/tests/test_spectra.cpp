#include "test_main.hpp"

#include <algorithm>
#include <random>

#include "nadyn/family.hpp"
#include "nadyn/spectra.hpp"
#include "oracles/eigen_roots.hpp"

using namespace nadyn;

namespace {

RationalMap family(const char* text) { return parse_family(text).map; }

bool is_zero_multiplier(const PuiseuxSeries& s) { return s.is_zero(); }

// Fixed multipliers of a complex quadratic map P/Q (P, Q of degree 2 with
// infinity not fixed), from the companion matrix of P - zQ.
std::vector<Complex> numeric_fixed_multipliers(const ComplexPoly& p, const ComplexPoly& q)
{
    ComplexPoly fix(4, 0.0);
    for (std::size_t k = 0; k < 3; ++k) {
        fix[k] += p[k];
        fix[k + 1] -= q[k];
    }
    std::vector<Complex> out;
    for (const Complex z : oracle::companion_roots(fix)) {
        const Complex pv = p[0] + z * (p[1] + z * p[2]);
        const Complex qv = q[0] + z * (q[1] + z * q[2]);
        const Complex dp = p[1] + 2.0 * z * p[2];
        const Complex dq = q[1] + 2.0 * z * q[2];
        out.push_back((dp * qv - pv * dq) / (qv * qv));
    }
    return out;
}

// Coefficient-wise comparison below `cut`, relative to the larger scale.
bool series_close(const PuiseuxSeries& a, const PuiseuxSeries& b, const RatExp& cut, double tol)
{
    const double scale = std::max({1.0, a.max_abs_coefficient(), b.max_abs_coefficient()});
    for (const auto& s : {a, b}) {
        for (const auto& t : s.terms()) {
            if (!(t.exp < cut)) {
                break;
            }
            if (std::abs(a.coefficient(t.exp) - b.coefficient(t.exp)) > tol * scale) {
                return false;
            }
        }
    }
    return true;
}

} // namespace

TEST_CASE("spectrum sizes are the formal cycle counts")
{
    for (const char* text : {"z^2 + t^-1", "z^2 + t", "(z^2 + t)/(1 + t*z)"}) {
        CycleCache cache(family(text), {});
        CHECK(lambda_spectrum(cache, 1).multipliers.size() == 3);
        CHECK(lambda_spectrum(cache, 2).multipliers.size() == 1);
        CHECK(lambda_spectrum(cache, 3).multipliers.size() == 2);
    }
    CycleCache cubic(family("z^3 + z*t^-1"), {});
    CHECK(lambda_spectrum(cubic, 1).multipliers.size() == 4);
    CHECK(lambda_spectrum(cubic, 1, true).multipliers.size() == 3);
    CHECK(lambda_spectrum(cubic, 2).multipliers.size() == 3);
    CHECK(lambda_spectrum(cubic, 3).multipliers.size() == 8);
}

TEST_CASE("fixed-point spectrum of z^2 + 1/t")
{
    const SpectrumReport s = lambda_spectrum(family("z^2 + t^-1"), 1);
    REQUIRE(s.multipliers.size() == 3);
    int half = 0;
    int zero = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        if (is_zero_multiplier(s.multipliers[i])) {
            ++zero;
            CHECK_FALSE(s.pole_flags[i]);
        } else if (s.multipliers[i].valuation() == Valuation(RatExp(-1, 2))) {
            ++half;
            CHECK(s.pole_flags[i]);
        }
    }
    CHECK(half == 2);
    CHECK(zero == 1);
    // mu = 2z over the roots of z^2 - z + 1/t: sigma_1 = 2, sigma_2 = 4/t, sigma_3 = 0.
    REQUIRE(s.symmetric_functions.size() == 3);
    CHECK(std::abs(s.symmetric_functions[0].coefficient(RatExp(0)) - 2.0) < 1e-9);
    CHECK(std::abs(s.symmetric_functions[1].coefficient(RatExp(-1)) - 4.0) < 1e-9);
    CHECK(s.symmetric_functions[2].max_abs_coefficient() < 1e-9);
}

TEST_CASE("constant quadratic spectrum")
{
    // z^2 + c: fixed multipliers 1 +- sqrt(1 - 4c) and 0 at infinity.
    const Complex c(0.3, -0.2);
    const RationalMap f(SeriesPoly{PuiseuxSeries(c), PuiseuxSeries(), PuiseuxSeries(1.0)}, SeriesPoly{PuiseuxSeries(1.0)}, 2);
    std::vector<Complex> got;
    for (const auto& m : lambda_spectrum(f, 1).multipliers) {
        got.push_back(m.coefficient(RatExp(0)));
    }
    const Complex r = std::sqrt(1.0 - 4.0 * c);
    std::vector<Complex> want{1.0 + r, 1.0 - r, 0.0};
    auto by_real = [](Complex a, Complex b) { return a.real() < b.real(); };
    std::sort(got.begin(), got.end(), by_real);
    std::sort(want.begin(), want.end(), by_real);
    REQUIRE(got.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(std::abs(got[i] - want[i]) < 1e-9);
    }
}

TEST_CASE("spectra are invariant under random Mobius conjugation")
{
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const PuiseuxSeries t = PuiseuxSeries::monomial(1.0, RatExp(1));
    auto rc = [&] { return Complex(u(rng), u(rng)); };
    const RationalMap bases[] = {family("z^2 + t^-1"), family("z^2 + t"), family("(z^2 + t)/(1 + t*z)")};
    for (int trial = 0; trial < 50; ++trial) {
        const RationalMap& f = bases[trial % 3];
        const Mobius m{add(PuiseuxSeries(1.0 + 0.5 * rc()), t.scaled(rc())), add(PuiseuxSeries(rc()), t.scaled(rc())),
                       t.scaled(rc()), PuiseuxSeries(1.0 + 0.5 * rc())};
        const RationalMap g = conjugate(f, m);
        for (int n = 1; n <= 2; ++n) {
            const SpectrumReport a = lambda_spectrum(f, n);
            const SpectrumReport b = lambda_spectrum(g, n);
            REQUIRE(a.symmetric_functions.size() == b.symmetric_functions.size());
            for (std::size_t k = 0; k < a.symmetric_functions.size(); ++k) {
                const PuiseuxSeries& x = a.symmetric_functions[k];
                const RatExp cut = (x.valuation().is_infinite() ? RatExp(0) : x.valuation().value()) + RatExp(4);
                CAPTURE(trial);
                CAPTURE(n);
                CAPTURE(k);
                CHECK(series_close(x, b.symmetric_functions[k], cut, 1e-8));
            }
        }
    }
}

TEST_CASE("blow-up detection")
{
    const auto a = detect_blow_up(family("z^2 + t^-1"), 3);
    REQUIRE(a.has_value());
    CHECK(a->period == 1);
    CHECK(a->cycle.multiplier_valuation == Valuation(RatExp(-1, 2)));

    CHECK_FALSE(detect_blow_up(family("z^2 + t"), 3).has_value());

    // f'(0) = 1/t.
    const auto b = detect_blow_up(family("z^3 + z*t^-1"), 3);
    REQUIRE(b.has_value());
    CHECK(b->period == 1);
    CHECK(b->cycle.multiplier_valuation == Valuation(RatExp(-1)));
}

TEST_CASE("period-2 certificates for polynomial families")
{
    const TheoremCertificate a = check_period2(family("z^2 + t^-1"));
    CHECK(a.verdict == Verdict::Verified);
    CHECK_FALSE(a.vacuous);
    REQUIRE(a.witness.has_value());
    CHECK(a.witness->period == 1);
    CHECK(a.witness->cycle.multiplier_valuation == Valuation(RatExp(-1, 2)));
    CHECK(a.pgr.outcome == PgrOutcome::NotPgr);

    const TheoremCertificate b = check_period2(family("z^3 + z*t^-1"));
    CHECK(b.verdict == Verdict::Verified);
    REQUIRE(b.witness.has_value());
    CHECK(b.witness->period == 1);
    CHECK(b.witness->cycle.multiplier_valuation == Valuation(RatExp(-1)));

    const TheoremCertificate c = check_period2(family("z^4 + t"));
    CHECK(c.verdict == Verdict::Verified);
    CHECK(c.vacuous);
    CHECK(c.pgr.outcome == PgrOutcome::Pgr);
    REQUIRE(c.audit.has_value());
    // All four finite fixed points share the Gauss ball: one point of degree 4.
    REQUIRE(c.audit->fixed_points.size() == 1);
    CHECK(c.audit->fixed_points[0].local_degree == 4);
    CHECK(c.audit->balls_consistent);

    CHECK_THROWS_AS_CODE(check_period2(family("(z^2 + t)/(1 + t*z)")), ErrorCode::PreconditionFailed);
}

TEST_CASE("period-2 audit counts around located type II points")
{
    // t z^3 + z^2: zeta(0, 1) fixed with degree 2 (fixed 0 and ~1, critical 0).
    const TheoremCertificate a = check_period2(family("t*z^3 + z^2"));
    CHECK(a.verdict == Verdict::Verified);
    REQUIRE(a.audit.has_value());
    REQUIRE(a.audit->fixed_points.size() == 1);
    CHECK(a.audit->fixed_points[0].point == TypeIIPoint::gauss());
    CHECK(a.audit->fixed_points[0].fixed_in_ball == 2);
    CHECK(a.audit->fixed_points[0].critical_in_ball == 1);
    CHECK(a.audit->balls_consistent);
}

TEST_CASE("period-3 certificates for cubic families")
{
    const TheoremCertificate a = check_period3(family("z^3 + z*t^-1"));
    CHECK(a.verdict == Verdict::Verified);
    REQUIRE(a.witness.has_value());
    CHECK(a.witness->period == 1);

    const TheoremCertificate b = check_period3(family("(z^3 + t)/(1 + t*z^3)"));
    CHECK(b.verdict == Verdict::Verified);
    CHECK(b.vacuous);
    CHECK(b.pgr.outcome == PgrOutcome::Pgr);

    // Fixed equation t z^3 + z^2 - z: the root -1/t + O(1) has multiplier
    // 3 t z^2 + 2 z = 1/t + O(1).
    const TheoremCertificate c = check_period3(family("t*z^3 + z^2"));
    CHECK(c.verdict == Verdict::Verified);
    REQUIRE(c.witness.has_value());
    CHECK(c.witness->period == 1);
    CHECK(c.witness->cycle.multiplier_valuation == Valuation(RatExp(-1)));
    const SeriesPoint& w = c.witness->cycle.points.front().point;
    const PuiseuxSeries z = w.chart == Chart::Affine ? w.coord : inv(w.coord);
    CHECK(z.valuation() == Valuation(RatExp(-1)));
    CHECK(std::abs(z.leading_coefficient() + 1.0) < 1e-9);
    CHECK(std::abs(c.witness->cycle.multiplier.leading_coefficient() - 1.0) < 1e-9);

    CHECK_THROWS_AS_CODE(check_period3(family("z^2 + t")), ErrorCode::PreconditionFailed);
}

TEST_CASE("main2 period bounds by family class")
{
    CHECK(check_main2(family("z^2 + t^-1")).period_bound == 1);
    CHECK(check_main2(family("z^3 + z*t^-1")).period_bound == 1);
    CHECK(check_main2(family("z^4 + z*t^-1")).period_bound == 2);
    CHECK(check_main2(family("(z^3 + t^-1)/z")).period_bound == 3);
    const TheoremCertificate m = check_main2(family("z^2 + t/z^2"));
    CHECK(m.period_bound == 0);
    CHECK(m.verdict == Verdict::Inconclusive);
    CHECK_FALSE(m.witness.has_value());
    for (const char* text : {"z^2 + t^-1", "z^3 + z*t^-1", "t*z^3 + z^2", "(z^3 + t^-1)/z", "(t*z^3 + 1)/z^2"}) {
        const TheoremCertificate c = check_main2(family(text));
        CAPTURE(text);
        CHECK(c.verdict == Verdict::Verified);
        REQUIRE(c.witness.has_value());
        CHECK(c.witness->period <= c.period_bound);
    }
}

TEST_CASE("pole dichotomy")
{
    CHECK(check_dichotomy(family("z^2 + t^-1"), 3).verdict == Verdict::Verified);
    CHECK(check_dichotomy(family("z^2 + t"), 3).verdict == Verdict::Verified);
    CHECK(check_dichotomy(family("z^2 + t/z^2"), 3).verdict == Verdict::Verified);
}

TEST_CASE("main5 fractions")
{
    CycleCache cache(family("z^2 + t^-1"), {});
    double last = 0.0;
    for (int n = 2; n <= 4; ++n) {
        const Main5Report r = check_main5_fraction(cache, n, 1.0, 4);
        CHECK(r.lambda == RatExp(1, 2));
        CHECK(r.fraction >= 0.75);
        CHECK(r.fraction >= last);
        last = r.fraction;
    }
    // n = 2: the four finite period-2 points have -val mu_2 = 1 >= 2 * (1/2) / 2.
    CHECK(check_main5_fraction(cache, 2, 1.0, 4).qualifying == 4);

    CycleCache bounded(family("z^2 + t"), {});
    CHECK_THROWS_AS_CODE(check_main5_fraction(bounded, 2, 1.0, 3), ErrorCode::PreconditionFailed);
    CycleCache mcmullen(family("z^2 + t/z^2"), {});
    CHECK_THROWS_AS_CODE(check_main5_fraction(mcmullen, 2, 1.0, 3), ErrorCode::PreconditionFailed);
}

TEST_CASE("Milnor relation: numeric oracle and series check")
{
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const ComplexPoly p{{g(rng), g(rng)}, {g(rng), g(rng)}, {g(rng), g(rng)}};
        const ComplexPoly q{{g(rng), g(rng)}, {g(rng), g(rng)}, {g(rng), g(rng)}};
        const auto mu = numeric_fixed_multipliers(p, q);
        REQUIRE(mu.size() == 3);
        const Complex s1 = mu[0] + mu[1] + mu[2];
        const Complex s3 = mu[0] * mu[1] * mu[2];
        const double scale = std::max({1.0, std::abs(s1), std::abs(s3)});
        REQUIRE(std::abs(s3 - (s1 - 2.0)) <= 1e-8 * scale);

        SeriesPoly ps;
        SeriesPoly qs;
        for (std::size_t k = 0; k < 3; ++k) {
            ps.emplace_back(p[k]);
            qs.emplace_back(q[k]);
        }
        const MilnorReport r = milnor_quadratic_check(RationalMap(ps, qs, 2));
        CAPTURE(trial);
        CHECK(r.relation_holds);
        CHECK(std::abs(r.sigma1.coefficient(RatExp(0)) - s1) <= 1e-8 * scale);
        CHECK(std::abs(r.sigma3.coefficient(RatExp(0)) - s3) <= 1e-8 * scale);
        CHECK_FALSE(r.degenerate);
    }

    const MilnorReport sq = milnor_quadratic_check(family("z^2"));
    CHECK(std::abs(sq.sigma1.coefficient(RatExp(0)) - 2.0) < 1e-12);
    CHECK(sq.sigma3.max_abs_coefficient() < 1e-12);
    CHECK(sq.relation_holds);

    const MilnorReport deg = milnor_quadratic_check(family("z^2 + t^-1"));
    CHECK(deg.relation_holds);
    CHECK(deg.degenerate);
    CHECK(milnor_quadratic_check(family("(z^2 + t)/(1 + t*z)")).relation_holds);
}
