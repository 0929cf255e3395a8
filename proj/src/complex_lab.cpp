#include "nadyn/complex_lab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <ostream>
#include <random>
#include <thread>

#include "nadyn/complex_roots.hpp"

namespace nadyn {

unsigned thread_count()
{
    if (const char* env = std::getenv("NADYN_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) {
            return static_cast<unsigned>(n);
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

// Runs body(i) for i < count on up to thread_count() workers; the first
// exception is rethrown after all workers stop.
template <class Body>
void parallel_for(std::size_t count, Body body)
{
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_count(), count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    const std::lock_guard lock(error_mutex);
                    if (!error) {
                        error = std::current_exception();
                    }
                    next = count;
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

ComplexRationalMap numeric_iterate(const ComplexRationalMap& f, int n)
{
    ComplexRationalMap g = f;
    for (int k = 1; k < n; ++k) {
        g = compose(f, g);
    }
    return g;
}

// F(z) / F'(z) for F = P_n - z Q_n, evaluated by iterating the homogeneous
// pair (P_k, Q_k) with derivatives; far better conditioned than the expanded
// coefficients. The pair is rescaled every step, which leaves F / F' unchanged.
Complex newton_ratio(const ComplexRationalMap& f, int n, Complex z)
{
    const int d = f.degree();
    Complex p = z, q = 1.0, dp = 1.0, dq = 0.0;
    std::vector<Complex> pp(static_cast<std::size_t>(d + 1)), qp(static_cast<std::size_t>(d + 1));
    for (int k = 0; k < n; ++k) {
        pp[0] = qp[0] = 1.0;
        for (int j = 1; j <= d; ++j) {
            pp[static_cast<std::size_t>(j)] = pp[static_cast<std::size_t>(j - 1)] * p;
            qp[static_cast<std::size_t>(j)] = qp[static_cast<std::size_t>(j - 1)] * q;
        }
        Complex np = 0.0, nq = 0.0, ndp = 0.0, ndq = 0.0;
        for (int j = 0; j <= d; ++j) {
            const auto uj = static_cast<std::size_t>(j);
            const auto vj = static_cast<std::size_t>(d - j);
            const Complex mono = pp[uj] * qp[vj];
            Complex dmono = 0.0;
            if (j > 0) {
                dmono += static_cast<double>(j) * pp[uj - 1] * qp[vj] * dp;
            }
            if (j < d) {
                dmono += static_cast<double>(d - j) * pp[uj] * qp[vj - 1] * dq;
            }
            np += f.p()[uj] * mono;
            nq += f.q()[uj] * mono;
            ndp += f.p()[uj] * dmono;
            ndq += f.q()[uj] * dmono;
        }
        const double scale = std::max(std::abs(np), std::abs(nq));
        if (scale == 0.0 || !std::isfinite(scale)) {
            return 0.0;
        }
        p = np / scale;
        q = nq / scale;
        dp = ndp / scale;
        dq = ndq / scale;
    }
    const Complex value = p - z * q;
    const Complex slope = dp - q - z * dq;
    return slope == Complex(0.0, 0.0) ? Complex(0.0, 0.0) : value / slope;
}

// Simultaneous (Aberth) refinement of all finite roots against the nested form.
void refine_roots(const ComplexRationalMap& f, int n, std::vector<Complex>& roots)
{
    for (int iter = 0; iter < 100; ++iter) {
        double worst = 0.0;
        for (std::size_t i = 0; i < roots.size(); ++i) {
            const Complex r = newton_ratio(f, n, roots[i]);
            if (r == Complex(0.0, 0.0)) {
                continue;
            }
            Complex repulsion = 0.0;
            for (std::size_t j = 0; j < roots.size(); ++j) {
                if (j != i && roots[j] != roots[i]) {
                    repulsion += 1.0 / (roots[i] - roots[j]);
                }
            }
            const Complex w = r / (1.0 - r * repulsion);
            if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) {
                continue;
            }
            roots[i] -= w;
            worst = std::max(worst, std::abs(w) / std::max(1.0, std::abs(roots[i])));
        }
        if (worst < 1e-15) {
            return;
        }
    }
}

ComplexPoint to_chart_point(Complex z)
{
    if (std::abs(z) <= 1.0) {
        return {Chart::Affine, z};
    }
    return {Chart::Flipped, 1.0 / z};
}

double root_of(Complex mu, int n) { return std::pow(std::abs(mu), 1.0 / n); }

double log_plus(double x) { return x > 1.0 ? std::log(x) : 0.0; }

std::int64_t ipow(std::int64_t b, int e)
{
    std::int64_t r = 1;
    for (int i = 0; i < e; ++i) {
        r *= b;
    }
    return r;
}

std::size_t nearest(const std::vector<ComplexPoint>& pts, const ComplexPoint& x)
{
    std::size_t best = 0;
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double e = chordal_distance(pts[i], x);
        if (e < d) {
            d = e;
            best = i;
        }
    }
    return best;
}

// Chart and leading term, e.g. "1/(-1i*t^(1/2) + ...)".
std::string point_label(const SeriesPoint& p)
{
    if (p.chart == Chart::Flipped && p.coord.is_zero()) {
        return "inf";
    }
    std::string body = "0";
    if (!p.coord.is_zero()) {
        body = PuiseuxSeries::monomial(p.coord.leading_coefficient(), p.coord.valuation().value()).to_string();
        if (p.coord.terms().size() > 1 || !p.coord.is_exact()) {
            body += " + ...";
        }
    }
    return p.chart == Chart::Flipped ? "1/(" + body + ")" : body;
}

ComplexPoint evaluate_point(const SeriesPoint& p, Complex t0) { return {p.chart, eval_complex(p.coord, t0).value}; }

Complex in_chart(const ComplexPoint& p, Chart chart)
{
    if (p.chart == chart) {
        return p.coord;
    }
    return p.coord == Complex(0.0, 0.0) ? Complex(std::numeric_limits<double>::infinity(), 0.0) : 1.0 / p.coord;
}

} // namespace

double chordal_distance(const ComplexPoint& a, const ComplexPoint& b)
{
    auto homogeneous = [](const ComplexPoint& p) {
        return p.chart == Chart::Affine ? std::pair<Complex, Complex>{p.coord, 1.0} : std::pair<Complex, Complex>{1.0, p.coord};
    };
    const auto [x1, y1] = homogeneous(a);
    const auto [x2, y2] = homogeneous(b);
    const double n1 = std::sqrt(std::norm(x1) + std::norm(y1));
    const double n2 = std::sqrt(std::norm(x2) + std::norm(y2));
    return std::abs(x1 * y2 - x2 * y1) / (n1 * n2);
}

SampleGrid log_grid(double r_max, double r_min, int per_decade, int angles_per_radius, std::uint64_t seed)
{
    if (!(r_min > 0.0) || !(r_max <= 0.5) || !(r_min <= r_max) || per_decade < 1 || angles_per_radius < 1) {
        throw Error(ErrorCode::PreconditionFailed, "radii must satisfy 0 < r_min <= r_max <= 1/2");
    }
    SampleGrid g;
    g.angles_per_radius = angles_per_radius;
    g.seed = seed;
    const double decades = std::log10(r_max / r_min);
    const int steps = static_cast<int>(std::ceil(decades * per_decade - 1e-9));
    for (int k = 0; k <= steps; ++k) {
        const double frac = steps == 0 ? 0.0 : static_cast<double>(k) / steps;
        g.radii.push_back(r_max * std::pow(10.0, -decades * frac));
    }
    return g;
}

std::vector<Complex> grid_parameters(const SampleGrid& grid)
{
    std::mt19937_64 rng(grid.seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Complex> out;
    for (const double r : grid.radii) {
        const double offset = u(rng);
        for (int j = 0; j < grid.angles_per_radius; ++j) {
            const double theta = 2.0 * std::numbers::pi * (j + offset) / grid.angles_per_radius;
            out.push_back(std::polar(r, theta));
        }
    }
    return out;
}

MultiplierSample sample_periodic(const RationalMap& f, int n, Complex t0, const AberthOptions& aberth)
{
    if (t0 == Complex(0.0, 0.0)) {
        throw Error(ErrorCode::PreconditionFailed, "sampling needs t0 != 0");
    }
    const ComplexRationalMap ft = specialize(f, t0);
    const ComplexRationalMap fn = numeric_iterate(ft, n);
    const ComplexPoly eq = trimmed(fixed_form(fn, Chart::Affine));
    const int total = fn.degree() + 1;

    MultiplierSample s;
    s.t0 = t0;
    s.period = n;
    std::vector<Complex> finite = aberth_roots(eq, aberth);
    refine_roots(ft, n, finite);
    for (const Complex z : finite) {
        s.points.push_back(to_chart_point(z));
    }
    for (int k = degree(eq); k < total; ++k) {
        s.points.push_back({Chart::Flipped, 0.0});
    }

    std::vector<double> roots;
    for (const auto& x0 : s.points) {
        std::vector<ComplexPoint> orbit{x0};
        for (int k = 1; k < n; ++k) {
            // Snap to the nearest computed root to stop drift along repelling orbits.
            orbit.push_back(s.points[nearest(s.points, image(ft, orbit.back()))]);
        }
        const Complex mu = cycle_multiplier(ft, orbit);
        s.multipliers.push_back(mu);
        roots.push_back(root_of(mu, n));
    }
    std::sort(roots.begin(), roots.end());
    s.max_root = roots.back();
    s.median_root = roots[roots.size() / 2];
    return s;
}

ScalingReport scaling_fit(const RationalMap& f, int n, const SampleGrid& grid, const DynamicsOptions& options,
                          double tolerance, bool allow_lost)
{
    if (grid.radii.empty() || grid.radii.front() / grid.radii.back() < 100.0 * (1.0 - 1e-9)) {
        throw Error(ErrorCode::PreconditionFailed, "scaling fit needs radii spanning two decades");
    }
    const auto cycles = periodic_cycles(f, n, options);
    const auto params = grid_parameters(grid);

    std::vector<MultiplierSample> samples(params.size());
    parallel_for(params.size(), [&](std::size_t i) { samples[i] = sample_periodic(f, n, params[i], options.aberth); });

    ScalingReport report;
    report.period = n;
    for (const auto& s : samples) {
        report.max_root = std::max(report.max_root, s.max_root);
    }
    for (std::size_t c = 0; c < cycles.size(); ++c) {
        const SeriesPoint& rep = cycles[c].points.front().point;
        CycleFit fit;
        fit.cycle_id = static_cast<int>(c);
        fit.exact_period = cycles[c].exact_period;
        fit.point = point_label(rep);
        fit.predicted = blow_up_exponent(cycles[c]);
        std::vector<double> xs;
        std::vector<double> ys;
        std::vector<ScanRow> rows;
        for (std::size_t i = 0; i < samples.size() && fit.matched; ++i) {
            const MultiplierSample& s = samples[i];
            const ComplexPoint target = evaluate_point(rep, params[i]);
            const std::size_t k = nearest(s.points, target);
            const double d1 = chordal_distance(s.points[k], target);
            double gap = std::numeric_limits<double>::infinity();
            for (const auto& p : s.points) {
                const double e = chordal_distance(p, s.points[k]);
                if (e > 1e-4) {
                    gap = std::min(gap, e);
                }
            }
            if (d1 > 0.5 * gap) {
                const std::string why = "cycle " + std::to_string(c) + " has no unambiguous root at |t| = " +
                                        std::to_string(std::abs(params[i]));
                if (!allow_lost) {
                    throw Error(ErrorCode::ContinuationLost, why);
                }
                fit.matched = false;
                fit.lost_reason = why;
                break;
            }
            const double root = root_of(s.multipliers[k], n);
            rows.push_back({params[i], n, fit.cycle_id, root});
            xs.push_back(std::log(1.0 / std::abs(params[i])));
            ys.push_back(log_plus(root));
        }
        if (!fit.matched) {
            report.fits.push_back(fit);
            continue;
        }
        report.rows.insert(report.rows.end(), rows.begin(), rows.end());
        const double m = static_cast<double>(xs.size());
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sx += xs[i];
            sy += ys[i];
            sxx += xs[i] * xs[i];
            sxy += xs[i] * ys[i];
        }
        fit.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        fit.intercept = (sy - fit.slope * sx) / m;
        double ss = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
            ss += r * r;
        }
        fit.residual = std::sqrt(ss / m);
        fit.agrees = std::abs(fit.slope - fit.predicted.to_double()) <= tolerance;
        report.fits.push_back(fit);
    }
    return report;
}

double fraction_exceeding(const MultiplierSample& sample, int degree, double c, double lambda)
{
    const double threshold = c * std::pow(std::abs(sample.t0), -lambda);
    int count = 0;
    for (const Complex mu : sample.multipliers) {
        if (std::max(1.0, root_of(mu, sample.period)) >= threshold) {
            ++count;
        }
    }
    return std::min(1.0, static_cast<double>(count) / static_cast<double>(ipow(degree, sample.period)));
}

double fraction_exceeding(const RationalMap& f, int n, Complex t0, double c, double lambda)
{
    return fraction_exceeding(sample_periodic(f, n, t0), f.degree(), c, lambda);
}

LyapComplex lyap_complex(const RationalMap& f, Complex t0, int n)
{
    const MultiplierSample s = sample_periodic(f, n, t0);
    double sum = 0.0;
    for (const Complex mu : s.multipliers) {
        sum += log_plus(std::abs(mu)) / n;
    }
    LyapComplex r;
    r.estimate = sum / static_cast<double>(ipow(f.degree(), n));
    r.ratio = r.estimate / std::log(1.0 / std::abs(t0));
    return r;
}

ConsistencyReport consistency_check(const RationalMap& f, int n, Complex t0, const DynamicsOptions& options)
{
    const MultiplierSample s = sample_periodic(f, n, t0, options.aberth);
    ConsistencyReport report;
    report.t0 = t0;
    report.period = n;
    for (const auto& p : periodic_points(f, n, options)) {
        const ComplexEvaluation ev = eval_complex(p.point.coord, t0);
        const ComplexPoint target{p.point.chart, ev.value};
        const Complex numeric = in_chart(s.points[nearest(s.points, target)], p.point.chart);
        ConsistencyRow row;
        row.point = point_label(p.point);
        row.chart = p.point.chart;
        row.predicted = ev.value;
        row.numeric = numeric;
        row.mismatch = std::abs(numeric - ev.value);
        const double scale = std::max(1.0, p.point.coord.max_abs_coefficient());
        row.bound = scale * ev.error_bound + 1e-6 * std::max(1.0, std::abs(ev.value));
        if (!(row.mismatch <= row.bound)) {
            throw Error(ErrorCode::NoMatch, "point " + row.point + " misses the nearest root by " +
                                                std::to_string(row.mismatch) + " (bound " + std::to_string(row.bound) + ")");
        }
        report.max_mismatch = std::max(report.max_mismatch, row.mismatch);
        report.rows.push_back(row);
    }
    return report;
}

void write_scan_csv(std::ostream& os, const std::vector<ScanRow>& rows)
{
    os << "t_re,t_im,abs_t,n,cycle,root\n";
    const auto old = os.precision(17);
    for (const auto& r : rows) {
        os << r.t.real() << ',' << r.t.imag() << ',' << std::abs(r.t) << ',' << r.period << ',' << r.cycle_id << ','
           << r.root << '\n';
    }
    os.precision(old);
}

} // namespace nadyn
