#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "nadyn/complex_roots.hpp"
#include "nadyn/error.hpp"
#include "nadyn/polynomial.hpp"

namespace nadyn {

struct PolygonSegment {
    /// Slope of the hull edge; the roots it announces have valuation -slope.
    RatExp slope;
    int start = 0;
    int end = 0;
    int length() const { return end - start; }
};

struct NewtonPolygon {
    std::vector<std::pair<int, RatExp>> vertices;
    std::vector<PolygonSegment> segments;
};

/// Lower convex hull of {(k, val a_k)} over the nonzero coefficients.
NewtonPolygon newton_polygon(const SeriesPoly& p);

struct PuiseuxRoot {
    PuiseuxSeries series;
    int multiplicity = 1;
};

/// Which roots to compute, by valuation. Roots equal to zero are always kept.
enum class RootRegion { All, NonNegative, Positive };

struct PuiseuxOptions {
    /// Absolute t-exponent up to which each root is computed.
    RatExp precision = RatExp(kDefaultWorkingOrder);
    std::int64_t ramification_cap = 64;
    ClusterOptions cluster;
    AberthOptions aberth;
    RootRegion region = RootRegion::All;
};

/// All roots of p in Puiseux series with multiplicity, ordered by
/// (valuation, leading coefficient). Throws RamificationCapExceeded and
/// ClusterAmbiguity.
std::vector<PuiseuxRoot> puiseux_roots(const SeriesPoly& p, const PuiseuxOptions& options = {});

/// Valuation used for orbit matching: the first exponent where a and b differ
/// by more than `relative_tolerance` times their coefficient scale, or the
/// truncation order of the difference when there is none.
Valuation match_valuation(const PuiseuxSeries& a, const PuiseuxSeries& b, double relative_tolerance = 1e-8);

/// Partitions points into cycles of `step`. `closeness(image, candidate)`
/// returns a match valuation; a candidate matches when it reaches
/// `precision_match`. Throws MatchAmbiguity when two candidates match or
/// the induced map is not a permutation, MatchFailure when none does.
template <class Point, class Step, class Closeness>
std::vector<std::vector<std::size_t>> separate_orbits(const std::vector<Point>& points, Step&& step,
                                                      Closeness&& closeness, const RatExp& precision_match)
{
    const std::size_t n = points.size();
    std::vector<std::size_t> image(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto img = step(points[i]);
        std::optional<std::size_t> found;
        for (std::size_t j = 0; j < n; ++j) {
            const Valuation v = closeness(img, points[j]);
            if (v >= Valuation(precision_match)) {
                if (found) {
                    throw Error(ErrorCode::MatchAmbiguity, "two candidate images within matching precision");
                }
                found = j;
            }
        }
        if (!found) {
            throw Error(ErrorCode::MatchFailure, "image of a root matches no root");
        }
        image[i] = *found;
    }
    std::vector<char> hit(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (hit[image[i]]) {
            throw Error(ErrorCode::MatchAmbiguity, "step does not permute the root set");
        }
        hit[image[i]] = 1;
    }
    std::vector<std::vector<std::size_t>> groups;
    std::vector<char> seen(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (seen[i]) {
            continue;
        }
        std::vector<std::size_t> orbit;
        for (std::size_t j = i; !seen[j]; j = image[j]) {
            seen[j] = 1;
            orbit.push_back(j);
        }
        groups.push_back(std::move(orbit));
    }
    return groups;
}

/// Orbit partition of single-chart roots under a series map.
std::vector<std::vector<std::size_t>> separate_orbits(const std::vector<PuiseuxRoot>& roots,
                                                      const std::function<PuiseuxSeries(const PuiseuxSeries&)>& step,
                                                      const RatExp& precision_match);

} // namespace nadyn
