#pragma once

#include <random>

#include "nadyn/puiseux.hpp"

namespace nadyn::testing {

// Random truncated Puiseux series: up to `max_terms` terms with exponents
// k/q, k in [-3q, 3q], optional truncation order above every term.
inline PuiseuxSeries random_series(std::mt19937_64& rng, int max_terms = 6, bool truncate = true)
{
    std::uniform_int_distribution<int> qdist(1, 4);
    std::uniform_int_distribution<int> ndist(1, max_terms);
    std::normal_distribution<double> coef(0.0, 1.0);
    const int q = qdist(rng);
    std::uniform_int_distribution<int> kdist(-3 * q, 3 * q);
    std::vector<Term> terms;
    const int n = ndist(rng);
    int kmax = -1000;
    for (int i = 0; i < n; ++i) {
        const int k = kdist(rng);
        kmax = std::max(kmax, k);
        terms.push_back({RatExp(k, q), Complex(coef(rng), coef(rng))});
    }
    std::optional<RatExp> order;
    if (truncate && std::bernoulli_distribution(0.5)(rng)) {
        order = RatExp(kmax + 1 + static_cast<int>(rng() % 4), q);
    }
    return PuiseuxSeries(std::move(terms), order);
}

} // namespace nadyn::testing
