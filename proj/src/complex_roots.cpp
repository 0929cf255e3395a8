#include "nadyn/complex_roots.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "nadyn/error.hpp"

namespace nadyn {

Complex horner(std::span<const Complex> coeffs, Complex z)
{
    Complex acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
        acc = acc * z + *it;
    }
    return acc;
}

namespace {

// Newton ratio p(z)/p'(z), evaluated in the reversed polynomial when |z| > 1
// so that high degrees do not overflow.
Complex newton_ratio(std::span<const Complex> c, Complex z)
{
    const std::size_t n = c.size() - 1;
    if (std::abs(z) <= 1.0) {
        Complex p = c[n];
        Complex dp = 0.0;
        for (std::size_t k = n; k-- > 0;) {
            dp = dp * z + p;
            p = p * z + c[k];
        }
        return p / dp;
    }
    const Complex w = 1.0 / z;
    Complex r = c[0];
    Complex dr = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
        dr = dr * w + r;
        r = r * w + c[k];
    }
    // p(z) = z^n r(w), p'(z) = z^{n-1} (n r(w) - w r'(w)).
    return z * r / (static_cast<double>(n) * r - w * dr);
}

// |p(z)| relative to sum |c_k| |z|^k: backward error of z as a root.
double backward_error(std::span<const Complex> c, Complex z)
{
    const double az = std::abs(z);
    if (az <= 1.0) {
        Complex p = 0.0;
        double m = 0.0;
        for (auto it = c.rbegin(); it != c.rend(); ++it) {
            p = p * z + *it;
            m = m * az + std::abs(*it);
        }
        return m > 0.0 ? std::abs(p) / m : 0.0;
    }
    const Complex w = 1.0 / z;
    const double aw = 1.0 / az;
    Complex r = 0.0;
    double m = 0.0;
    for (const auto& ck : c) {
        r = r * w + ck;
        m = m * aw + std::abs(ck);
    }
    return m > 0.0 ? std::abs(r) / m : 0.0;
}

std::vector<Complex> initial_guesses(std::span<const Complex> c, double rotation)
{
    const std::size_t n = c.size() - 1;
    std::vector<std::pair<double, double>> pts; // (k, log|c_k|)
    for (std::size_t k = 0; k <= n; ++k) {
        if (std::abs(c[k]) > 0.0) {
            pts.emplace_back(static_cast<double>(k), std::log(std::abs(c[k])));
        }
    }
    // Upper convex hull.
    std::vector<std::pair<double, double>> hull;
    for (const auto& p : pts) {
        while (hull.size() >= 2) {
            const auto& a = hull[hull.size() - 2];
            const auto& b = hull.back();
            const double cross = (b.first - a.first) * (p.second - a.second) - (b.second - a.second) * (p.first - a.first);
            if (cross >= 0.0) {
                hull.pop_back();
            } else {
                break;
            }
        }
        hull.push_back(p);
    }
    std::vector<Complex> z;
    z.reserve(n);
    for (std::size_t i = 0; i + 1 < hull.size(); ++i) {
        const int count = static_cast<int>(hull[i + 1].first - hull[i].first);
        const double radius = std::exp((hull[i].second - hull[i + 1].second) / count);
        for (int j = 0; j < count; ++j) {
            const double angle = 2.0 * M_PI * j / count + 2.0 * M_PI * static_cast<double>(i) / n + rotation + 0.4;
            z.push_back(std::polar(radius, angle));
        }
    }
    return z;
}

bool run_aberth(std::span<const Complex> c, std::vector<Complex>& z, const AberthOptions& options)
{
    const std::size_t n = z.size();
    std::vector<char> done(n, 0);
    for (int iter = 0; iter < options.max_iterations; ++iter) {
        bool all_done = true;
        for (std::size_t i = 0; i < n; ++i) {
            if (done[i]) {
                continue;
            }
            const Complex ratio = newton_ratio(c, z[i]);
            Complex repulsion = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i) {
                    const Complex d = z[i] - z[j];
                    if (d != Complex(0.0, 0.0)) {
                        repulsion += 1.0 / d;
                    }
                }
            }
            const Complex step = ratio / (1.0 - ratio * repulsion);
            if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) {
                return false;
            }
            z[i] -= step;
            const double scale = std::max(std::abs(z[i]), std::numeric_limits<double>::min() * 1e10);
            if (std::abs(step) <= options.tolerance * scale || backward_error(c, z[i]) <= 4.0 * n * 2.2e-16) {
                done[i] = 1;
            } else {
                all_done = false;
            }
        }
        if (all_done) {
            return true;
        }
    }
    // Accept stagnation at roundoff level.
    for (std::size_t i = 0; i < n; ++i) {
        if (!done[i] && backward_error(c, z[i]) > 1e-10) {
            return false;
        }
    }
    return true;
}

} // namespace

std::vector<Complex> aberth_roots(std::span<const Complex> coeffs, const AberthOptions& options)
{
    std::size_t lo = 0;
    while (lo < coeffs.size() && coeffs[lo] == Complex(0.0, 0.0)) {
        ++lo;
    }
    std::size_t hi = coeffs.size();
    while (hi > lo && coeffs[hi - 1] == Complex(0.0, 0.0)) {
        --hi;
    }
    if (hi <= lo) {
        throw Error(ErrorCode::RootFinderNonConvergence, "zero polynomial has no finite root set");
    }
    std::vector<Complex> roots(lo, Complex(0.0, 0.0));
    const std::span<const Complex> c = coeffs.subspan(lo, hi - lo);
    const std::size_t n = c.size() - 1;
    if (n == 0) {
        return roots;
    }
    if (n == 1) {
        roots.push_back(-c[0] / c[1]);
        return roots;
    }
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    double rotation = 0.0;
    for (int attempt = 0; attempt <= options.restarts; ++attempt) {
        std::vector<Complex> z = initial_guesses(c, rotation);
        if (run_aberth(c, z, options)) {
            roots.insert(roots.end(), z.begin(), z.end());
            return roots;
        }
        rotation = angle(rng);
    }
    throw Error(ErrorCode::RootFinderNonConvergence,
                "Aberth iteration did not converge for degree " + std::to_string(n));
}

namespace {

// Taylor coefficient p^{(j)}(z)/j! and its magnitude bound sum |c_k| C(k,j) |z|^{k-j}.
std::pair<Complex, double> taylor_coefficient(std::span<const Complex> c, Complex z, std::size_t j)
{
    // Repeated synthetic division.
    std::vector<Complex> b(c.begin(), c.end());
    std::vector<double> m(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) {
        m[k] = std::abs(c[k]);
    }
    const double az = std::abs(z);
    Complex value = 0.0;
    double mass = 0.0;
    std::size_t n = b.size();
    for (std::size_t step = 0; step <= j && n > 0; ++step) {
        for (std::size_t k = n - 1; k-- > 0;) {
            b[k] += z * b[k + 1];
            m[k] += az * m[k + 1];
        }
        value = b[0];
        mass = m[0];
        // Shift out the remainder.
        b.erase(b.begin());
        m.erase(m.begin());
        --n;
    }
    return {value, mass};
}

double multiple_root_test(std::span<const Complex> c, Complex center, std::size_t r)
{
    double worst = 0.0;
    for (std::size_t j = 0; j < r; ++j) {
        const auto [v, mass] = taylor_coefficient(c, center, j);
        worst = std::max(worst, mass > 0.0 ? std::abs(v) / mass : 0.0);
    }
    return worst;
}

Complex polish_center(std::span<const Complex> c, Complex center, std::size_t r, double spread)
{
    if (r <= 1) {
        return center;
    }
    // Newton on p^{(r-1)}, which has `center` as a simple root.
    std::vector<Complex> d(c.begin(), c.end());
    for (std::size_t k = 0; k + 1 < r; ++k) {
        for (std::size_t i = 1; i < d.size(); ++i) {
            d[i - 1] = d[i] * static_cast<double>(i);
        }
        d.pop_back();
    }
    if (d.size() < 2) {
        return center;
    }
    Complex z = center;
    for (int it = 0; it < 8; ++it) {
        const Complex ratio = newton_ratio(d, z);
        if (!std::isfinite(ratio.real()) || !std::isfinite(ratio.imag())) {
            break;
        }
        z -= ratio;
        if (std::abs(ratio) <= 1e-16 * std::max(1.0, std::abs(z))) {
            break;
        }
    }
    // Keep the polished point only if it stayed inside the group.
    return std::abs(z - center) <= std::max(spread, 1e-3 * std::max(1.0, std::abs(center))) ? z : center;
}

std::vector<std::vector<Complex>> split_by_distance(const std::vector<Complex>& group, double radius)
{
    std::vector<int> label(group.size(), -1);
    int labels = 0;
    for (std::size_t i = 0; i < group.size(); ++i) {
        if (label[i] >= 0) {
            continue;
        }
        label[i] = labels;
        std::vector<std::size_t> stack{i};
        while (!stack.empty()) {
            const std::size_t a = stack.back();
            stack.pop_back();
            for (std::size_t b = 0; b < group.size(); ++b) {
                if (label[b] < 0 && std::abs(group[a] - group[b]) <= radius * std::max(1.0, std::abs(group[a]))) {
                    label[b] = labels;
                    stack.push_back(b);
                }
            }
        }
        ++labels;
    }
    std::vector<std::vector<Complex>> out(static_cast<std::size_t>(labels));
    for (std::size_t i = 0; i < group.size(); ++i) {
        out[static_cast<std::size_t>(label[i])].push_back(group[i]);
    }
    return out;
}

void cluster_group(std::span<const Complex> c, std::vector<Complex> group, double radius,
                   const ClusterOptions& options, std::vector<RootCluster>& out)
{
    if (group.size() == 1) {
        out.push_back({group.front(), 1});
        return;
    }
    Complex centroid = std::accumulate(group.begin(), group.end(), Complex(0.0, 0.0)) / static_cast<double>(group.size());
    double spread = 0.0;
    for (const auto& z : group) {
        spread = std::max(spread, std::abs(z - centroid));
    }
    centroid = polish_center(c, centroid, group.size(), spread);
    const double test = multiple_root_test(c, centroid, group.size());
    if (test <= options.epsilon) {
        out.push_back({centroid, static_cast<int>(group.size())});
        return;
    }
    if (test <= 10.0 * options.epsilon) {
        throw Error(ErrorCode::ClusterAmbiguity,
                    "multiple-root test " + std::to_string(test) + " within one decade of the cluster tolerance");
    }
    const double next = radius / 4.0;
    if (next < 1e-15) {
        for (const auto& z : group) {
            out.push_back({z, 1});
        }
        return;
    }
    for (auto& sub : split_by_distance(group, next)) {
        cluster_group(c, std::move(sub), next, options, out);
    }
}

} // namespace

std::vector<RootCluster> cluster_roots(std::span<const Complex> coeffs, std::span<const Complex> roots,
                                       const ClusterOptions& options)
{
    std::vector<RootCluster> out;
    for (auto& group : split_by_distance(std::vector<Complex>(roots.begin(), roots.end()), options.initial_radius)) {
        cluster_group(coeffs, std::move(group), options.initial_radius, options, out);
    }
    std::sort(out.begin(), out.end(), [](const RootCluster& a, const RootCluster& b) {
        if (a.center.real() != b.center.real()) {
            return a.center.real() < b.center.real();
        }
        return a.center.imag() < b.center.imag();
    });
    return out;
}

} // namespace nadyn
