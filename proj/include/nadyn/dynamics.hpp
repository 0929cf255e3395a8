#pragma once

#include <map>
#include <vector>

#include "nadyn/newton_puiseux.hpp"
#include "nadyn/rational_map.hpp"

namespace nadyn {

enum class CycleClass { Repelling, Indifferent, Attracting };

const char* cycle_class_name(CycleClass c);

struct PeriodicPoint {
    SeriesPoint point;
    int multiplicity = 1;
};

struct CycleRecord {
    int period = 1;       // n of the fixed equation the points solve
    int exact_period = 1; // m, the orbit length under f
    std::vector<PeriodicPoint> points;
    PuiseuxSeries multiplier; // of f^m along the orbit
    Valuation multiplier_valuation;
    CycleClass cycle_class = CycleClass::Indifferent;
    /// Number of formal n-cycles this orbit accounts for (0 if none).
    int formal_count = 0;
    bool formal() const { return formal_count > 0; }
};

struct DynamicsOptions {
    RatExp precision = RatExp(kDefaultWorkingOrder);
    std::int64_t ramification_cap = 64;
    std::size_t size_budget = 5000;
    int n_max = 6;
    double root_of_unity_tolerance = 1e-6;
    AberthOptions aberth{};
};

/// Checks d >= 2 and that P, Q share no root for small t != 0.
void validate_family(const RationalMap& f);

/// P_n(z) - z Q_n(z) for f^n = P_n/Q_n (no cancellation).
SeriesPoly fixed_equation(const RationalMap& f, int n, std::size_t budget = 5000);

/// All solutions of f^n(x) = x on P^1 with multiplicity; affine points have
/// val >= 0, flipped ones val > 0. Total multiplicity is d^n + 1.
std::vector<PeriodicPoint> periodic_points(const RationalMap& f, int n, const DynamicsOptions& options = {});

/// Orbits of the period-n points with exact periods, multipliers and the
/// formal-cycle tally. Throws FormalCycleAmbiguity on borderline roots of unity.
std::vector<CycleRecord> periodic_cycles(const RationalMap& f, int n, const DynamicsOptions& options = {});

/// Multiplier of f along a cycle given as consecutive points.
PuiseuxSeries multiplier(const RationalMap& f, const std::vector<SeriesPoint>& orbit);

/// max(0, -val mu_m) / m: growth rate of |mu_n|^{1/n}.
RatExp blow_up_exponent(const CycleRecord& cycle);

/// Sum over the records of formal_count.
int formal_cycle_count(const std::vector<CycleRecord>& cycles);

/// d^{-n} * sum over period-n points (with multiplicity) of max(0, -val mu_m)/m.
/// A periodic-point estimator of the non-archimedean Lyapunov exponent.
RatExp lyap_na_estimate(const std::vector<CycleRecord>& cycles, int degree, int n);
RatExp lyap_na_estimate(const RationalMap& f, int n, const DynamicsOptions& options = {});

/// Memoizes periodic_cycles per period for one family.
class CycleCache {
public:
    CycleCache(RationalMap f, DynamicsOptions options) : f_(std::move(f)), options_(options) {}
    const std::vector<CycleRecord>& cycles(int n);
    const RationalMap& map() const { return f_; }
    const DynamicsOptions& options() const { return options_; }

private:
    RationalMap f_;
    DynamicsOptions options_;
    std::map<int, std::vector<CycleRecord>> cache_;
};

} // namespace nadyn
