#include "nadyn/puiseux.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <utility>

#include "nadyn/error.hpp"

namespace nadyn {

namespace {

// A cancellation result is noise when it is tiny compared to what produced it.
bool is_noise(Complex sum, double contributions)
{
    return std::abs(sum) <= kZeroTolerance * contributions;
}

std::int64_t lcm64(std::int64_t a, std::int64_t b) { return a / std::gcd(a, b) * b; }

// Value used in truncation propagation: valuation, or the order of a series
// that is zero to its truncation.
std::optional<RatExp> val_or_order(const PuiseuxSeries& s)
{
    if (!s.is_zero()) {
        return s.terms().front().exp;
    }
    return s.order();
}

std::string format_double(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string format_coefficient(Complex c)
{
    if (c.imag() == 0.0) {
        return format_double(c.real());
    }
    if (c.real() == 0.0) {
        return "(" + format_double(c.imag()) + "*i)";
    }
    return "(" + format_double(c.real()) + "+" + format_double(c.imag()) + "*i)";
}

std::string format_power(const RatExp& e)
{
    if (e.is_integer()) {
        return "t^" + e.to_string();
    }
    return "t^(" + e.to_string() + ")";
}

} // namespace

double Valuation::norm() const
{
    if (is_infinite()) {
        return 0.0;
    }
    return std::exp(-value_->to_double());
}

std::string Valuation::to_string() const { return is_infinite() ? "inf" : value_->to_string(); }

std::optional<RatExp> min_order(const std::optional<RatExp>& a, const std::optional<RatExp>& b)
{
    if (!a) {
        return b;
    }
    if (!b) {
        return a;
    }
    return min(*a, *b);
}

PuiseuxSeries::PuiseuxSeries(Complex c)
{
    if (std::abs(c) > kZeroTolerance) {
        terms_.push_back({RatExp(0), c});
    }
}

PuiseuxSeries::PuiseuxSeries(std::vector<Term> terms, std::optional<RatExp> order) : order_(order)
{
    std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.exp < b.exp; });
    terms_.reserve(terms.size());
    for (std::size_t i = 0; i < terms.size();) {
        Complex sum = terms[i].coef;
        double mass = std::abs(sum);
        std::size_t j = i + 1;
        for (; j < terms.size() && terms[j].exp == terms[i].exp; ++j) {
            sum += terms[j].coef;
            mass += std::abs(terms[j].coef);
        }
        const bool beyond = order_ && !(terms[i].exp < *order_);
        if (!beyond && std::abs(sum) > kZeroTolerance && !is_noise(sum, mass)) {
            terms_.push_back({terms[i].exp, sum});
        }
        i = j;
    }
}

PuiseuxSeries PuiseuxSeries::monomial(Complex c, RatExp e) { return PuiseuxSeries({Term{e, c}}); }

PuiseuxSeries PuiseuxSeries::big_o(RatExp order)
{
    PuiseuxSeries s;
    s.order_ = order;
    return s;
}

std::int64_t PuiseuxSeries::ramification() const
{
    std::int64_t q = 1;
    for (const auto& t : terms_) {
        q = lcm64(q, t.exp.den());
    }
    return q;
}

Valuation PuiseuxSeries::valuation() const
{
    if (terms_.empty()) {
        return Valuation::infinity();
    }
    return Valuation(terms_.front().exp);
}

Complex PuiseuxSeries::leading_coefficient() const
{
    return terms_.empty() ? Complex(0.0, 0.0) : terms_.front().coef;
}

Complex PuiseuxSeries::coefficient(const RatExp& e) const
{
    const auto it = std::lower_bound(terms_.begin(), terms_.end(), e,
                                     [](const Term& t, const RatExp& x) { return t.exp < x; });
    if (it != terms_.end() && it->exp == e) {
        return it->coef;
    }
    return {0.0, 0.0};
}

double PuiseuxSeries::max_abs_coefficient() const
{
    double m = 0.0;
    for (const auto& t : terms_) {
        m = std::max(m, std::abs(t.coef));
    }
    return m;
}

PuiseuxSeries PuiseuxSeries::truncated(const RatExp& order) const
{
    PuiseuxSeries r;
    r.order_ = min_order(order_, order);
    for (const auto& t : terms_) {
        if (!(t.exp < *r.order_)) {
            break;
        }
        r.terms_.push_back(t);
    }
    return r;
}

PuiseuxSeries PuiseuxSeries::scaled(Complex c, const RatExp& e) const
{
    PuiseuxSeries r;
    if (order_) {
        r.order_ = *order_ + e;
    }
    if (std::abs(c) == 0.0) {
        return r;
    }
    r.terms_.reserve(terms_.size());
    for (const auto& t : terms_) {
        const Complex v = t.coef * c;
        if (std::abs(v) > kZeroTolerance) {
            r.terms_.push_back({t.exp + e, v});
        }
    }
    return r;
}

PuiseuxSeries PuiseuxSeries::as_exact() const
{
    PuiseuxSeries r = *this;
    r.order_.reset();
    return r;
}

std::string PuiseuxSeries::to_string() const
{
    std::string out;
    for (const auto& t : terms_) {
        if (!out.empty()) {
            out += " + ";
        }
        out += format_coefficient(t.coef);
        if (t.exp != RatExp(0)) {
            out += "*" + format_power(t.exp);
        }
    }
    if (order_) {
        if (!out.empty()) {
            out += " + ";
        }
        out += "O(" + format_power(*order_) + ")";
    }
    return out.empty() ? "0" : out;
}

Valuation val(const PuiseuxSeries& s) { return s.valuation(); }

PuiseuxSeries add(const PuiseuxSeries& a, const PuiseuxSeries& b)
{
    const auto order = min_order(a.order(), b.order());
    std::vector<Term> out;
    out.reserve(a.terms().size() + b.terms().size());
    auto push = [&](const RatExp& e, Complex c, double mass) {
        if (order && !(e < *order)) {
            return;
        }
        if (!is_noise(c, mass)) {
            out.push_back({e, c});
        }
    };
    const auto& ta = a.terms();
    const auto& tb = b.terms();
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < ta.size() || j < tb.size()) {
        if (j == tb.size() || (i < ta.size() && ta[i].exp < tb[j].exp)) {
            push(ta[i].exp, ta[i].coef, std::abs(ta[i].coef));
            ++i;
        } else if (i == ta.size() || tb[j].exp < ta[i].exp) {
            push(tb[j].exp, tb[j].coef, std::abs(tb[j].coef));
            ++j;
        } else {
            push(ta[i].exp, ta[i].coef + tb[j].coef, std::max(std::abs(ta[i].coef), std::abs(tb[j].coef)));
            ++i;
            ++j;
        }
    }
    // Already sorted and merged; the constructor only re-validates.
    return PuiseuxSeries(std::move(out), order);
}

PuiseuxSeries neg(const PuiseuxSeries& a) { return a.scaled(Complex(-1.0, 0.0)); }

PuiseuxSeries sub(const PuiseuxSeries& a, const PuiseuxSeries& b) { return add(a, neg(b)); }

PuiseuxSeries mul(const PuiseuxSeries& a, const PuiseuxSeries& b, const std::optional<RatExp>& limit)
{
    if ((a.is_zero() && a.is_exact()) || (b.is_zero() && b.is_exact())) {
        return PuiseuxSeries();
    }
    std::optional<RatExp> order;
    if (a.order()) {
        if (const auto vb = val_or_order(b)) {
            order = *a.order() + *vb;
        }
    }
    if (b.order()) {
        if (const auto va = val_or_order(a)) {
            order = min_order(order, *b.order() + *va);
        }
    }
    order = min_order(order, limit);
    if (a.is_zero() || b.is_zero()) {
        PuiseuxSeries r = PuiseuxSeries::big_o(order.value());
        return r;
    }

    const std::int64_t q = lcm64(a.ramification(), b.ramification());
    auto scaled_exp = [q](const RatExp& e) { return e.num() * (q / e.den()); };
    const std::int64_t lo = scaled_exp(a.terms().front().exp) + scaled_exp(b.terms().front().exp);
    std::int64_t hi = scaled_exp(a.terms().back().exp) + scaled_exp(b.terms().back().exp);
    if (order) {
        // Largest admissible exponent index strictly below the order.
        const RatExp scaled_order = *order * RatExp(q);
        hi = std::min(hi, scaled_order.ceil() - 1);
    }
    if (hi < lo) {
        return PuiseuxSeries::big_o(order.value());
    }

    std::vector<std::int64_t> ea;
    std::vector<std::int64_t> eb;
    ea.reserve(a.terms().size());
    eb.reserve(b.terms().size());
    for (const auto& t : a.terms()) {
        ea.push_back(scaled_exp(t.exp));
    }
    for (const auto& t : b.terms()) {
        eb.push_back(scaled_exp(t.exp));
    }

    const std::size_t span = static_cast<std::size_t>(hi - lo + 1);
    std::vector<Term> out;
    if (span <= 8 * a.terms().size() * b.terms().size() + 64) {
        std::vector<Complex> acc(span);
        std::vector<double> mass(span, 0.0);
        std::vector<char> touched(span, 0);
        for (std::size_t i = 0; i < ea.size(); ++i) {
            const Complex ca = a.terms()[i].coef;
            for (std::size_t j = 0; j < eb.size(); ++j) {
                const std::int64_t e = ea[i] + eb[j];
                if (e > hi) {
                    break;
                }
                const auto k = static_cast<std::size_t>(e - lo);
                const Complex p = ca * b.terms()[j].coef;
                acc[k] += p;
                mass[k] += std::abs(p.real()) + std::abs(p.imag());
                touched[k] = 1;
            }
        }
        for (std::size_t k = 0; k < span; ++k) {
            if (touched[k] && !is_noise(acc[k], mass[k])) {
                out.push_back({RatExp(static_cast<std::int64_t>(k) + lo, q), acc[k]});
            }
        }
    } else {
        struct Prod {
            std::int64_t e;
            Complex c;
        };
        std::vector<Prod> prods;
        for (std::size_t i = 0; i < ea.size(); ++i) {
            for (std::size_t j = 0; j < eb.size(); ++j) {
                const std::int64_t e = ea[i] + eb[j];
                if (e > hi) {
                    break;
                }
                prods.push_back({e, a.terms()[i].coef * b.terms()[j].coef});
            }
        }
        std::sort(prods.begin(), prods.end(), [](const Prod& x, const Prod& y) { return x.e < y.e; });
        for (std::size_t i = 0; i < prods.size();) {
            Complex sum = 0.0;
            double m = 0.0;
            std::size_t j = i;
            for (; j < prods.size() && prods[j].e == prods[i].e; ++j) {
                sum += prods[j].c;
                m += std::abs(prods[j].c.real()) + std::abs(prods[j].c.imag());
            }
            if (!is_noise(sum, m)) {
                out.push_back({RatExp(prods[i].e, q), sum});
            }
            i = j;
        }
    }
    return PuiseuxSeries(std::move(out), order);
}

PuiseuxSeries inv(const PuiseuxSeries& a, const RatExp& relative_order)
{
    if (a.is_zero()) {
        throw Error(ErrorCode::ZeroDivision, "inverse of a series that is zero to its truncation");
    }
    const RatExp v = a.terms().front().exp;
    const Complex c = a.terms().front().coef;
    if (a.terms().size() == 1 && a.is_exact()) {
        return PuiseuxSeries::monomial(Complex(1.0, 0.0) / c, -v);
    }
    // a = c t^v (1 + u) with val(u) > 0; invert 1 + u by Newton iteration.
    RatExp depth = relative_order;
    if (a.order()) {
        depth = min(depth, *a.order() - v);
    }
    const PuiseuxSeries unit = a.scaled(Complex(1.0, 0.0) / c, -v);
    if (unit.terms().size() == 1) {
        // a is a monomial known only to finite order.
        return PuiseuxSeries::monomial(Complex(1.0, 0.0) / c, -v).truncated(depth - v);
    }
    const RatExp step = unit.terms()[1].exp;
    PuiseuxSeries b(1.0);
    RatExp known = step;
    const PuiseuxSeries two(2.0);
    while (true) {
        known = min(known + known, depth);
        const PuiseuxSeries ub = mul(unit, b, known);
        // b is correct below `known`; treat it as exact for the next doubling.
        b = mul(b, sub(two, ub), known).as_exact();
        if (!(known < depth)) {
            break;
        }
    }
    return b.truncated(depth).scaled(Complex(1.0, 0.0) / c, -v);
}

PuiseuxSeries div(const PuiseuxSeries& a, const PuiseuxSeries& b, const RatExp& relative_order)
{
    if (b.is_zero()) {
        throw Error(ErrorCode::ZeroDivision, "division by a series that is zero to its truncation");
    }
    if (b.is_exact() && b.terms().size() == 1) {
        const Complex c = b.terms().front().coef;
        return a.scaled(Complex(1.0, 0.0) / c, -b.terms().front().exp);
    }
    // Depth of the quotient follows the numerator's valuation.
    const auto va = val_or_order(a);
    const RatExp vb = b.terms().front().exp;
    const PuiseuxSeries ib = inv(b, relative_order);
    std::optional<RatExp> limit;
    if (va) {
        limit = *va - vb + relative_order;
    }
    return mul(a, ib, limit);
}

PuiseuxSeries pow(const PuiseuxSeries& a, unsigned k, const std::optional<RatExp>& limit)
{
    PuiseuxSeries result(1.0);
    PuiseuxSeries base = a;
    while (k > 0) {
        if (k & 1U) {
            result = mul(result, base, limit);
        }
        k >>= 1U;
        if (k > 0) {
            base = mul(base, base, limit);
        }
    }
    return result;
}

bool approx_equal(const PuiseuxSeries& a, const PuiseuxSeries& b, double tol, const std::optional<RatExp>& below)
{
    auto in_range = [&](const RatExp& e) { return !below || e < *below; };
    const auto& ta = a.terms();
    const auto& tb = b.terms();
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < ta.size() || j < tb.size()) {
        RatExp e;
        Complex ca = 0.0;
        Complex cb = 0.0;
        if (j == tb.size() || (i < ta.size() && ta[i].exp < tb[j].exp)) {
            e = ta[i].exp;
            ca = ta[i++].coef;
        } else if (i == ta.size() || tb[j].exp < ta[i].exp) {
            e = tb[j].exp;
            cb = tb[j++].coef;
        } else {
            e = ta[i].exp;
            ca = ta[i++].coef;
            cb = tb[j++].coef;
        }
        if (!in_range(e)) {
            break;
        }
        if (std::abs(ca - cb) > tol * std::max({1.0, std::abs(ca), std::abs(cb)})) {
            return false;
        }
    }
    return true;
}

ComplexEvaluation eval_complex(const PuiseuxSeries& s, Complex t0, std::int64_t branch)
{
    const std::int64_t q = s.ramification();
    const double r = std::abs(t0);
    const double theta = (std::arg(t0) + 2.0 * M_PI * static_cast<double>(branch)) / static_cast<double>(q);
    Complex value = 0.0;
    for (const auto& t : s.terms()) {
        const double e = t.exp.to_double();
        const double n = static_cast<double>(t.exp.num() * (q / t.exp.den()));
        value += t.coef * std::polar(std::pow(r, e), n * theta);
    }
    const double bound = s.order() ? std::pow(r, s.order()->to_double()) : 0.0;
    return {value, bound};
}

} // namespace nadyn
