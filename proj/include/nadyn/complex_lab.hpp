#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nadyn/dynamics.hpp"

namespace nadyn {

/// Sampling grid in the punctured disc |t| <= 1/2.
struct SampleGrid {
    std::vector<double> radii; // decreasing
    int angles_per_radius = 4;
    std::uint64_t seed = 1;
};

/// Log-spaced radii from r_max down to r_min, `per_decade` per factor of 10.
SampleGrid log_grid(double r_max, double r_min, int per_decade = 2, int angles_per_radius = 4, std::uint64_t seed = 1);

/// The parameters t0 of the grid in grid order (radius-major); angles are
/// evenly spaced with a seeded random offset per radius.
std::vector<Complex> grid_parameters(const SampleGrid& grid);

struct MultiplierSample {
    Complex t0;
    int period = 1;
    /// Solutions of f^n(z) = z with repetition (d^n + 1 of them).
    std::vector<ComplexPoint> points;
    /// Multiplier of f^n at each point.
    std::vector<Complex> multipliers;
    double max_root = 0.0;    // max |mu|^{1/n}
    double median_root = 0.0; // median |mu|^{1/n}
};

/// Numeric periodic points and multipliers of f_{t0}.
MultiplierSample sample_periodic(const RationalMap& f, int n, Complex t0, const AberthOptions& aberth = {});

/// Chordal distance on the Riemann sphere.
double chordal_distance(const ComplexPoint& a, const ComplexPoint& b);

struct ScanRow {
    Complex t;
    int period = 1;
    int cycle_id = 0;
    double root = 0.0; // |mu|^{1/n}
};

struct CycleFit {
    int cycle_id = 0;
    int exact_period = 1;
    std::string point;   // a Puiseux point of the cycle
    RatExp predicted;    // blow-up exponent
    double slope = 0.0;  // of (1/n) log+ |mu| against log(1/|t|)
    double intercept = 0.0;
    double residual = 0.0; // rms
    bool agrees = false;   // |slope - predicted| <= tolerance
    /// False when allow_lost was set and the cycle could not be matched.
    bool matched = true;
    std::string lost_reason;
};

struct ScalingReport {
    int period = 1;
    std::vector<CycleFit> fits;
    std::vector<ScanRow> rows;
    /// max |mu|^{1/n} over every sampled point of the grid.
    double max_root = 0.0;
};

/// Matches each Puiseux cycle to numeric roots across the grid and fits the
/// growth of (1/n) log+ |mu|. Throws ContinuationLost when a match is not
/// unambiguous (unless allow_lost, which marks the cycle unmatched instead)
/// and PreconditionFailed when the radii span under two decades.
ScalingReport scaling_fit(const RationalMap& f, int n, const SampleGrid& grid, const DynamicsOptions& options = {},
                          double tolerance = 0.05, bool allow_lost = false);

/// Fraction of period-n points with max(1, |mu|)^{1/n} >= C |t0|^{-lambda},
/// over d^n and clamped to 1.
double fraction_exceeding(const MultiplierSample& sample, int degree, double c, double lambda);
double fraction_exceeding(const RationalMap& f, int n, Complex t0, double c, double lambda);

struct LyapComplex {
    double estimate = 0.0; // d^{-n} sum (1/n) log+ |mu|
    double ratio = 0.0;    // estimate / log(1/|t0|)
};

LyapComplex lyap_complex(const RationalMap& f, Complex t0, int n);

struct ConsistencyRow {
    std::string point;
    Chart chart = Chart::Affine;
    Complex predicted;
    Complex numeric;
    double mismatch = 0.0;
    double bound = 0.0;
};

struct ConsistencyReport {
    Complex t0;
    int period = 1;
    std::vector<ConsistencyRow> rows;
    double max_mismatch = 0.0;
};

/// Evaluates every Puiseux period-n point at t0 and matches it to a numeric
/// root within max(1, max|coef|) |t0|^order plus root-finder tolerance.
/// Throws NoMatch beyond that bound.
ConsistencyReport consistency_check(const RationalMap& f, int n, Complex t0, const DynamicsOptions& options = {});

/// "t_re,t_im,abs_t,n,cycle,root" rows.
void write_scan_csv(std::ostream& os, const std::vector<ScanRow>& rows);

/// Worker count: NADYN_THREADS when set and positive, else the hardware count.
unsigned thread_count();

} // namespace nadyn
