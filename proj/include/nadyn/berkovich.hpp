#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nadyn/dynamics.hpp"

namespace nadyn {

/// zeta(a, e^{-rho}): the closed ball {z : val(z - a) >= rho}. The center is
/// kept modulo t^rho, so terms at or beyond rho are dropped.
class TypeIIPoint {
public:
    TypeIIPoint() = default;
    TypeIIPoint(PuiseuxSeries center, RatExp rho);

    static TypeIIPoint gauss() { return {}; }

    const PuiseuxSeries& center() const { return center_; }
    const RatExp& rho() const { return rho_; }

    /// val(z - a) >= rho. Throws BoundaryAmbiguity when truncation hides the answer.
    bool contains(const PuiseuxSeries& z) const;

    std::string to_string() const;

    friend bool operator==(const TypeIIPoint& a, const TypeIIPoint& b);

private:
    PuiseuxSeries center_;
    RatExp rho_{0};
};

/// Smallest ball containing both: zeta(a_x, min(rho_x, rho_y, val(a_x - a_y))).
TypeIIPoint join(const TypeIIPoint& x, const TypeIIPoint& y);

/// (rho_x - rho_join) + (rho_y - rho_join).
RatExp hyperbolic_distance(const TypeIIPoint& x, const TypeIIPoint& y);

/// f o M with M(z) = a + t^rho z, which pulls x back to the Gauss point.
RationalMap conjugate_to_gauss(const RationalMap& f, const TypeIIPoint& x, std::int64_t ramification_cap = 64);

struct ImagePoint {
    TypeIIPoint point;
    /// The image lies outside the closed unit ball, on the infinity side of the Gauss point.
    bool beyond_gauss = false;
};

/// f(x) by minimizing the Gauss norm of P - cQ over constants c after moving
/// x to the Gauss point. Throws TruncationExhausted when the cancellation runs
/// into the truncation order, PreconditionFailed for a constant map.
ImagePoint image_point(const RationalMap& f, const TypeIIPoint& x);

/// Reduction of f at x: a complex rational map with common factors removed.
struct ReducedMap {
    ComplexPoly p;
    ComplexPoly q;
    int degree = 0;
};

ReducedMap reduce_at(const RationalMap& f, const TypeIIPoint& x);

int local_degree(const RationalMap& f, const TypeIIPoint& x);

/// Gauss point fixed with local degree d.
bool has_good_reduction(const RationalMap& f);

enum class PgrOutcome { NotPgr, Pgr, Inconclusive };
const char* pgr_outcome_name(PgrOutcome o);

struct PgrCertificate {
    PgrOutcome outcome = PgrOutcome::Inconclusive;
    /// NotPgr: a cycle with negative multiplier valuation.
    std::optional<CycleRecord> cycle;
    /// Pgr: a fixed type II point of full local degree.
    std::optional<TypeIIPoint> point;
    int candidates_tested = 0;
};

struct PgrOptions {
    /// Length of the Gauss-point orbit that seeds the candidates.
    int budget = 8;
    /// Periods scanned for a repelling cycle.
    int max_period = 3;
    DynamicsOptions dynamics{};
};

/// Semi-decision of potential good reduction. Candidates for a good-reduction
/// point are the Gauss orbit, medians of its triples and joins of fixed and
/// critical points.
PgrCertificate potential_good_reduction_search(const RationalMap& f, const PgrOptions& options = {});
/// Same, reusing cycles already computed for the cache's family and options.
PgrCertificate potential_good_reduction_search(CycleCache& cache, const PgrOptions& options = {});

struct RayFixedPoint {
    TypeIIPoint point;
    int local_degree = 1;
};

/// First f-fixed type II point on the segment from the fixed point x0 to
/// infinity, for a polynomial family. With Taylor coefficients c_k of f at x0
/// the radius map is rho -> min_k val(c_k) + k rho; the answer is its smallest
/// fixed rho. Throws NoBreakpoint when x0 is repelling (every ball about x0
/// expands), PreconditionFailed when f is not polynomial or x0 is not fixed.
RayFixedPoint fixed_type_II_on_ray(const RationalMap& f, const PuiseuxSeries& x0);

/// Roots of f^n(z) = z in the closed ball, with multiplicity.
int count_fixed_in_ball(const RationalMap& f, const TypeIIPoint& x, int n, const DynamicsOptions& options = {});

/// Finite critical points (roots of P'Q - PQ') in the closed ball, with multiplicity.
int count_critical_in_ball(const RationalMap& f, const TypeIIPoint& x, const DynamicsOptions& options = {});

} // namespace nadyn
