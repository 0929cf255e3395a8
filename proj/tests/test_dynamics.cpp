#include "test_main.hpp"

#include <algorithm>
#include <random>

#include "nadyn/dynamics.hpp"
#include "nadyn/family.hpp"
#include "oracles/eigen_roots.hpp"

using namespace nadyn;

namespace {

RationalMap family(const char* text) { return parse_family(text).map; }

int point_total(const std::vector<CycleRecord>& cycles)
{
    int total = 0;
    for (const auto& c : cycles) {
        for (const auto& p : c.points) {
            total += p.multiplicity;
        }
    }
    return total;
}

std::int64_t ipow(std::int64_t b, int e)
{
    std::int64_t r = 1;
    for (int i = 0; i < e; ++i) {
        r *= b;
    }
    return r;
}

// Coefficient of t^e in a series, for comparisons against hand expansions.
Complex coef(const PuiseuxSeries& s, RatExp e) { return s.coefficient(e); }

// f(z) and f'(z) for a complex rational map, straight from the definition.
std::pair<Complex, Complex> value_and_derivative(const ComplexPoly& p, const ComplexPoly& q, Complex z)
{
    Complex pv = 0.0, dp = 0.0, qv = 0.0, dq = 0.0;
    for (std::size_t k = p.size(); k-- > 0;) {
        dp = dp * z + pv;
        pv = pv * z + p[k];
    }
    for (std::size_t k = q.size(); k-- > 0;) {
        dq = dq * z + qv;
        qv = qv * z + q[k];
    }
    return {pv / qv, (dp * qv - pv * dq) / (qv * qv)};
}

} // namespace

TEST_CASE("iterate composes without cancellation")
{
    const RationalMap sq = family("z^2");
    const RationalMap sq2 = iterate(sq, 2);
    CHECK(sq2.degree() == 4);
    CHECK(degree(sq2.p()) == 4);
    CHECK(degree(sq2.q()) == 0);

    const RationalMap inv = family("1/z");
    const RationalMap inv2 = iterate(RationalMap(inv.p(), inv.q(), 1), 2);
    // z -> 1/z twice is z/1.
    CHECK(degree(inv2.p()) == 1);
    CHECK(degree(inv2.q()) == 0);
    CHECK(coef(inv2.p()[1], 0) / coef(inv2.q()[0], 0) == Complex(1.0));

    // (z^2 + 1/t)^2 + 1/t = z^4 + 2 t^-1 z^2 + t^-2 + t^-1.
    const RationalMap f2 = iterate(family("z^2 + t^-1"), 2);
    CHECK(coef(f2.p()[4], 0) == Complex(1.0));
    CHECK(coef(f2.p()[2], -1) == Complex(2.0));
    CHECK(coef(f2.p()[0], -2) == Complex(1.0));
    CHECK(coef(f2.p()[0], -1) == Complex(1.0));
    CHECK(f2.p()[3].is_zero());
    CHECK(f2.p()[1].is_zero());

    CHECK_THROWS_AS(iterate(sq, 13), Error);
    try {
        iterate(sq, 13);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SizeBudgetExceeded);
    }
}

TEST_CASE("fixed equations")
{
    const SeriesPoly a = fixed_equation(family("z^2"), 1);
    CHECK(a[0].is_zero());
    CHECK(coef(a[1], 0) == Complex(-1.0));
    CHECK(coef(a[2], 0) == Complex(1.0));

    const SeriesPoly b = fixed_equation(family("z^2 + t^-1"), 1);
    CHECK(b[0].to_string() == "1*t^-1");
    CHECK(coef(b[1], 0) == Complex(-1.0));
    CHECK(coef(b[2], 0) == Complex(1.0));

    const SeriesPoly c = fixed_equation(family("z^3 + z*t^-1"), 1);
    CHECK(c[1].to_string() == "1*t^-1 + -1");
    CHECK(c[0].is_zero());
    CHECK(c[2].is_zero());
    CHECK(coef(c[3], 0) == Complex(1.0));
}

TEST_CASE("fixed points of z^2 + 1/t")
{
    const auto cycles = periodic_cycles(family("z^2 + t^-1"), 1);
    REQUIRE(cycles.size() == 3);
    int repelling = 0;
    for (const auto& c : cycles) {
        CHECK(c.exact_period == 1);
        const SeriesPoint& x = c.points[0].point;
        if (x.chart == Chart::Flipped && x.coord.is_zero()) {
            // Infinity, superattracting.
            CHECK(c.multiplier_valuation.is_infinite());
            CHECK(c.cycle_class == CycleClass::Attracting);
            continue;
        }
        ++repelling;
        CHECK(c.multiplier_valuation == Valuation(RatExp(-1, 2)));
        CHECK(c.cycle_class == CycleClass::Repelling);
        // mu = 2 z with z = +-i t^{-1/2} + 1/2 + ...; negative valuation puts z in the flipped chart.
        REQUIRE(x.chart == Chart::Flipped);
        const PuiseuxSeries z = inv(x.coord, 12);
        CHECK(z.valuation() == Valuation(RatExp(-1, 2)));
        CHECK(std::abs(std::abs(coef(z, RatExp(-1, 2))) - 1.0) < 1e-12);
        CHECK(std::abs(coef(z, 0) - 0.5) < 1e-12);
        CHECK(match_valuation(c.multiplier, z * PuiseuxSeries(2.0)) >= Valuation(RatExp(8)));
        CHECK(blow_up_exponent(c) == RatExp(1, 2));
    }
    CHECK(repelling == 2);
    CHECK(formal_cycle_count(cycles) == 3);
}

TEST_CASE("constant family z^2 - 1 has the 2-cycle {0, -1}")
{
    const RationalMap f = family("z^2 - 1");
    const auto cycles = periodic_cycles(f, 2);
    const CycleRecord* two = nullptr;
    for (const auto& c : cycles) {
        if (c.exact_period == 2) {
            two = &c;
        }
    }
    REQUIRE(two != nullptr);
    std::vector<Complex> pts;
    for (const auto& p : two->points) {
        pts.push_back(coef(p.point.coord, 0));
    }
    std::sort(pts.begin(), pts.end(), [](Complex a, Complex b) { return a.real() < b.real(); });
    CHECK(std::abs(pts[0] + 1.0) < 1e-12);
    CHECK(std::abs(pts[1]) < 1e-12);
    // Numeric chain rule: f'(0) f'(-1) = 0 * (-2).
    const ComplexPoly p{-1.0, 0.0, 1.0};
    const ComplexPoly q{1.0};
    const Complex oracle = value_and_derivative(p, q, 0.0).second * value_and_derivative(p, q, -1.0).second;
    CHECK(std::abs(eval_complex(two->multiplier, 0.5).value - oracle) < 1e-12);
    CHECK(two->formal_count == 1);
    CHECK(formal_cycle_count(cycles) == 1);
}

TEST_CASE("parabolic fixed point counts as a formal 2-cycle")
{
    // f(z) - z = (z - 3/2)(z + 1/2); f^2(z) - z = (z - 3/2)(z + 1/2)^3.
    const auto cycles = periodic_cycles(family("z^2 - 0.75"), 2);
    int formal = 0;
    bool saw_parabolic = false;
    for (const auto& c : cycles) {
        formal += c.formal_count;
        if (c.exact_period == 1 && std::abs(coef(c.points[0].point.coord, 0) + 0.5) < 1e-9) {
            saw_parabolic = true;
            CHECK(c.points[0].multiplicity == 3);
            CHECK(std::abs(coef(c.multiplier, 0) + 1.0) < 1e-9);
            CHECK(c.formal_count == 1);
        }
    }
    CHECK(saw_parabolic);
    CHECK(formal == 1);
    CHECK(point_total(cycles) == 5);
}

TEST_CASE("periodic point and formal cycle counts")
{
    const char* quadratic[] = {"z^2 + t^-1", "z^2 + t", "(z^2 + t)/(1 + t*z)"};
    const char* cubic[] = {"z^3 + z*t^-1", "t*z^3 + z^2", "(z^3 + t^-1)/z", "(t*z^3 + 1)/z^2"};
    auto formal_expected = [](int d, int n) {
        const std::int64_t dn = ipow(d, n);
        return n == 1 ? d + 1 : n == 2 ? (dn - d) / 2 : (dn - d) / 3;
    };
    for (const char* text : quadratic) {
        for (int n = 1; n <= 3; ++n) {
            CAPTURE(text);
            CAPTURE(n);
            const auto cycles = periodic_cycles(family(text), n);
            CHECK(point_total(cycles) == ipow(2, n) + 1);
            CHECK(formal_cycle_count(cycles) == formal_expected(2, n));
        }
    }
    for (const char* text : cubic) {
        for (int n = 1; n <= 3; ++n) {
            CAPTURE(text);
            CAPTURE(n);
            const auto cycles = periodic_cycles(family(text), n);
            CHECK(point_total(cycles) == ipow(3, n) + 1);
            CHECK(formal_cycle_count(cycles) == formal_expected(3, n));
        }
    }
}

TEST_CASE("chain rule: multiplier does not depend on the starting point")
{
    const RationalMap f = family("z^2 + t^-1");
    for (const auto& c : periodic_cycles(f, 3)) {
        std::vector<SeriesPoint> orbit;
        for (const auto& p : c.points) {
            orbit.push_back(p.point);
        }
        for (std::size_t s = 1; s < orbit.size(); ++s) {
            std::rotate(orbit.begin(), orbit.begin() + 1, orbit.end());
            const PuiseuxSeries mu = multiplier(f, orbit);
            CHECK(match_valuation(mu, c.multiplier) >= Valuation(c.multiplier_valuation.value() + RatExp(6)));
        }
    }
}

TEST_CASE("conjugation invariance of multipliers")
{
    const RationalMap f = family("z^2 + t^-1");
    const PuiseuxSeries t = PuiseuxSeries::monomial(1.0, RatExp(1));
    const Mobius maps[] = {
        {PuiseuxSeries(2.0), t, PuiseuxSeries(), PuiseuxSeries(1.0)},
        {PuiseuxSeries(1.0), PuiseuxSeries(Complex(0.5, -0.25)), PuiseuxSeries(), PuiseuxSeries(3.0)},
    };
    for (const auto& m : maps) {
        const RationalMap g = conjugate(f, m);
        for (int n = 1; n <= 2; ++n) {
            auto key = [](const std::vector<CycleRecord>& cs) {
                std::vector<std::pair<RatExp, double>> out;
                for (const auto& c : cs) {
                    if (!c.multiplier_valuation.is_infinite()) {
                        out.emplace_back(c.multiplier_valuation.value(),
                                         std::arg(c.multiplier.leading_coefficient()));
                    }
                }
                std::sort(out.begin(), out.end());
                return out;
            };
            const auto a = key(periodic_cycles(f, n));
            const auto b = key(periodic_cycles(g, n));
            REQUIRE(a.size() == b.size());
            for (std::size_t i = 0; i < a.size(); ++i) {
                CHECK(a[i].first == b[i].first);
                CHECK(std::abs(a[i].second - b[i].second) < 1e-8);
            }
        }
    }
}

TEST_CASE("holomorphic index of fixed points, numeric oracle")
{
    std::mt19937_64 rng(99);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        // Generic degree-2 map: P, Q of degree 2, so infinity is not fixed.
        const ComplexPoly p{{g(rng), g(rng)}, {g(rng), g(rng)}, {g(rng), g(rng)}};
        const ComplexPoly q{{g(rng), g(rng)}, {g(rng), g(rng)}, {g(rng), g(rng)}};
        ComplexPoly fix(4, 0.0);
        for (std::size_t k = 0; k < 3; ++k) {
            fix[k] += p[k];
            fix[k + 1] -= q[k];
        }
        Complex index = 0.0;
        for (const Complex z : oracle::companion_roots(fix)) {
            index += 1.0 / (1.0 - value_and_derivative(p, q, z).second);
        }
        CHECK(std::abs(index - 1.0) < 1e-6);
    }
    // Series fixed points of z^2 + 1/t evaluated at sample parameters.
    const auto cycles = periodic_cycles(family("z^2 + t^-1"), 1);
    for (int k = 0; k < 10; ++k) {
        const Complex t0 = std::polar(1e-3 * (1 + k), 0.3 * k);
        Complex index = 0.0;
        for (const auto& c : cycles) {
            index += 1.0 / (1.0 - eval_complex(c.multiplier, t0).value);
        }
        CHECK(std::abs(index - 1.0) < 1e-6);
    }
}

TEST_CASE("blow-up exponents and the Lyapunov estimator")
{
    CycleRecord r;
    r.exact_period = 1;
    r.multiplier_valuation = Valuation(RatExp(-1, 2));
    CHECK(blow_up_exponent(r) == RatExp(1, 2));
    r.multiplier_valuation = Valuation(RatExp(0));
    CHECK(blow_up_exponent(r) == RatExp(0));
    r.exact_period = 2;
    r.multiplier_valuation = Valuation(RatExp(-3));
    CHECK(blow_up_exponent(r) == RatExp(3, 2));
    r.multiplier_valuation = Valuation::infinity();
    CHECK(blow_up_exponent(r) == RatExp(0));

    // z^2 + 1/t: every finite period-n point has val -1/2, so mu_n = 2^n prod z_i
    // has val -n/2 and each of the 2^n finite points contributes 1/2.
    const RationalMap f = family("z^2 + t^-1");
    for (int n = 1; n <= 4; ++n) {
        CHECK(lyap_na_estimate(f, n) == RatExp(1, 2));
    }
    for (int n = 1; n <= 3; ++n) {
        CHECK(lyap_na_estimate(family("z^2 + t"), n) == RatExp(0));
        CHECK(lyap_na_estimate(family("z^2 + t/z^2"), n) == RatExp(0));
    }
}

TEST_CASE("McMullen family has no repelling cycles")
{
    const RationalMap f = family("z^2 + t/z^2");
    for (int n = 1; n <= 3; ++n) {
        for (const auto& c : periodic_cycles(f, n)) {
            CHECK(c.cycle_class != CycleClass::Repelling);
        }
    }
}

TEST_CASE("separate_orbits on series roots")
{
    PuiseuxOptions po;
    // Period-2 roots of z^2 - 1: the 2-cycle {0, -1} and two fixed points.
    const RationalMap f = family("z^2 - 1");
    const auto roots = puiseux_roots(fixed_equation(f, 2), po);
    auto step = [&](const PuiseuxSeries& z) { return add(mul(z, z), PuiseuxSeries(-1.0)); };
    const auto groups = separate_orbits(roots, step, RatExp(10));
    std::vector<std::size_t> sizes;
    for (const auto& g : groups) {
        sizes.push_back(g.size());
    }
    std::sort(sizes.begin(), sizes.end());
    CHECK(sizes == std::vector<std::size_t>{1, 1, 2});

    // Period-3 roots of z^2 + 1/t: groups of size dividing 3.
    const RationalMap h = family("z^2 + t^-1");
    const auto roots3 = puiseux_roots(fixed_equation(h, 3), po);
    const PuiseuxSeries c = PuiseuxSeries::monomial(1.0, RatExp(-1));
    auto step3 = [&](const PuiseuxSeries& z) { return add(mul(z, z), c); };
    const auto groups3 = separate_orbits(roots3, step3, RatExp(5));
    std::size_t total = 0;
    for (const auto& g : groups3) {
        CHECK((g.size() == 1 || g.size() == 3));
        total += g.size();
    }
    CHECK(total == 8);
}

TEST_CASE("family validation")
{
    CHECK_NOTHROW(validate_family(family("z^2 + t^-1")));
    CHECK_NOTHROW(validate_family(family("(z^3 + t^-1)/z")));
    auto code = [](const char* text) {
        try {
            validate_family(family(text));
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::PreconditionFailed;
    };
    CHECK(code("z + t") == ErrorCode::InvalidFamily);
    CHECK(code("(z^2 - 1)/(z - 1)") == ErrorCode::InvalidFamily);
}
