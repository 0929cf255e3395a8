#include "test_main.hpp"

#include <random>

#include "nadyn/polynomial.hpp"
#include "random_series.hpp"

using namespace nadyn;

namespace {

// Term-list Horner with explicit truncation, independent of the library's
// evaluation path.
PuiseuxSeries horner_reference(const SeriesPoly& p, const PuiseuxSeries& z, const std::optional<RatExp>& limit)
{
    const Valuation vz = val(z);
    PuiseuxSeries acc = p.back();
    for (std::size_t k = p.size() - 1; k-- > 0;) {
        std::optional<RatExp> lim;
        if (limit) {
            lim = vz.is_infinite() ? *limit : *limit - vz.value() * RatExp(static_cast<std::int64_t>(k));
        }
        acc = add(mul(acc, z, lim), p[k]);
        if (lim) {
            acc = acc.truncated(*lim);
        }
    }
    return acc;
}

} // namespace

TEST_CASE("evaluation agrees with term-list Horner")
{
    std::mt19937_64 rng(4242);
    int compared = 0;
    for (int trial = 0; trial < 2000; ++trial) {
        const int d = 1 + static_cast<int>(rng() % 6);
        SeriesPoly p;
        for (int k = 0; k <= d; ++k) {
            p.push_back(testing::random_series(rng, 4, true));
        }
        const PuiseuxSeries z = testing::random_series(rng, 5, true);
        std::optional<RatExp> limit;
        if (rng() % 2 == 0) {
            limit = RatExp(static_cast<std::int64_t>(rng() % 12) - 2, 1 + static_cast<std::int64_t>(rng() % 3));
        }
        const PuiseuxSeries got = evaluate(p, z, limit);
        const PuiseuxSeries want = horner_reference(p, z, limit);
        CHECK(got.order() == want.order());
        const PuiseuxSeries diff = sub(got, want);
        double scale = 1.0;
        for (const auto& t : want.terms()) {
            scale = std::max(scale, std::abs(t.coef));
        }
        for (const auto& t : diff.terms()) {
            CHECK(std::abs(t.coef) <= 1e-10 * scale);
        }
        ++compared;
    }
    CHECK(compared == 2000);
}

TEST_CASE("evaluation of exact polynomials")
{
    const PuiseuxSeries t = PuiseuxSeries::monomial(1.0, RatExp(1));
    // z^2 - t at z = t^{1/2} vanishes exactly.
    const SeriesPoly p{neg(t), PuiseuxSeries(), PuiseuxSeries(1.0)};
    const PuiseuxSeries r = evaluate(p, PuiseuxSeries::monomial(1.0, RatExp(1, 2)), std::nullopt);
    CHECK(r.is_zero());
    CHECK(r.is_exact());
    // (1 + z)^2 at z = t + O(t^3) is 1 + 2t + t^2 + O(t^3).
    const SeriesPoly q{PuiseuxSeries(1.0), PuiseuxSeries(2.0), PuiseuxSeries(1.0)};
    const PuiseuxSeries s = evaluate(q, add(t, PuiseuxSeries::big_o(RatExp(3))), std::nullopt);
    CHECK(s.to_string() == "1 + 2*t^1 + 1*t^2 + O(t^3)");
}
