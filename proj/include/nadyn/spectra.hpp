#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nadyn/berkovich.hpp"
#include "nadyn/dynamics.hpp"

namespace nadyn {

struct SpectrumReport {
    int period = 1;
    bool excludes_infinity = false;
    /// Multiplier of f^n, one entry per formal n-cycle.
    std::vector<PuiseuxSeries> multipliers;
    /// sigma_1 .. sigma_k of the multipliers.
    std::vector<PuiseuxSeries> symmetric_functions;
    std::vector<bool> pole_flags;
};

/// Lambda_n. With exclude_infinity (polynomial families, n = 1) the fixed
/// point at infinity is dropped, giving d entries instead of d + 1.
SpectrumReport lambda_spectrum(CycleCache& cache, int n, bool exclude_infinity = false);
SpectrumReport lambda_spectrum(const RationalMap& f, int n, bool exclude_infinity = false,
                               const DynamicsOptions& options = {});

/// Elementary symmetric functions sigma_1 .. sigma_k of the values.
std::vector<PuiseuxSeries> elementary_symmetric(const std::vector<PuiseuxSeries>& values);

/// Multiplier of f^n along a cycle record of exact period m dividing n.
PuiseuxSeries multiplier_of_iterate(const CycleRecord& cycle, int n);

struct BlowUpWitness {
    int period = 1;
    CycleRecord cycle;
};

/// Smallest period <= n_max carrying a cycle with a multiplier pole.
std::optional<BlowUpWitness> detect_blow_up(CycleCache& cache, int n_max);
std::optional<BlowUpWitness> detect_blow_up(const RationalMap& f, int n_max, const DynamicsOptions& options = {});

enum class Verdict { Verified, CounterexampleCandidate, Inconclusive };
const char* verdict_name(Verdict v);

struct BallAuditEntry {
    TypeIIPoint point;
    int local_degree = 0;
    int fixed_in_ball = 0;
    int critical_in_ball = 0;
};

struct TwoCycleAuditEntry {
    TypeIIPoint point;
    TypeIIPoint image;
    int mu_plus = 0;  // local degree at point
    int mu_minus = 0; // local degree at image; mu_plus >= mu_minus
};

/// Counting quantities around the fixed and 2-periodic type II points of
/// local degree >= 2 that could be located from rigid non-repelling points.
struct Period2Audit {
    std::vector<BallAuditEntry> fixed_points;
    std::vector<TwoCycleAuditEntry> two_cycles;
    int sum_excess = 0;  // sum (mu+ + mu- - 2)
    int sum_product = 0; // sum mu+ mu-
    int excess_bound = 0;  // n - 1 with n located fixed points
    int product_bound = 0; // 2 n (n - 1)
    bool excess_within_bound = true;
    bool product_above_bound = true;
    bool balls_consistent = true; // fixed = delta, critical = delta - 1 in each ball
    std::vector<std::string> notes;
};

struct TheoremCertificate {
    std::string theorem;
    Verdict verdict = Verdict::Inconclusive;
    /// Verified only because the family has potential good reduction.
    bool vacuous = false;
    int period_bound = 0;
    std::optional<BlowUpWitness> witness;
    PgrCertificate pgr;
    std::optional<Period2Audit> audit;
    std::vector<std::string> notes;
};

struct CheckOptions {
    DynamicsOptions dynamics{};
    PgrOptions pgr{};
};

/// Polynomial family: a repelling cycle of period <= 2, of period 1 when d <= 3.
TheoremCertificate check_period2(const RationalMap& f, const CheckOptions& options = {});

/// Cubic rational family: a repelling cycle of period <= 3.
TheoremCertificate check_period3(const RationalMap& f, const CheckOptions& options = {});

/// Blow-up period bound by family class: 1 (quadratic, cubic polynomial),
/// 2 (polynomial), 3 (cubic rational). Other classes get no prediction.
TheoremCertificate check_main2(const RationalMap& f, const CheckOptions& options = {});

/// No multiplier pole up to n_max iff the non-archimedean Lyapunov estimate
/// vanishes up to n_max.
TheoremCertificate check_dichotomy(const RationalMap& f, int n_max, const CheckOptions& options = {});

struct Main5Report {
    int period = 1;
    RatExp lambda;
    double log_a = 0.0;
    /// Period-n points (with multiplicity) with -val(mu_n) >= n lambda / 2 + log A.
    int qualifying = 0;
    /// Qualifying count over d^n, clamped to 1.
    double fraction = 0.0;
};

/// lambda is lyap_na_estimate(f, lambda_period). Throws PreconditionFailed
/// when it is not positive.
Main5Report check_main5_fraction(CycleCache& cache, int n, double a, int lambda_period);

struct MilnorReport {
    std::vector<PuiseuxSeries> multipliers;
    PuiseuxSeries sigma1, sigma2, sigma3;
    /// max |coefficient of sigma3 - sigma1 + 2| relative to the coefficient scale.
    double relation_defect = 0.0;
    bool relation_holds = false;
    bool degenerate = false;
};

MilnorReport milnor_quadratic_check(const RationalMap& f, const DynamicsOptions& options = {},
                                    double tolerance = 1e-8);

} // namespace nadyn
