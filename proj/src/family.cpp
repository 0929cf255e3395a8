#include "nadyn/family.hpp"

#include <cctype>
#include <cstdlib>

#include "nadyn/error.hpp"

namespace nadyn {

namespace {

struct Fraction {
    SeriesPoly num{PuiseuxSeries(0.0)};
    SeriesPoly den{PuiseuxSeries(1.0)};
};

SeriesPoly constant(PuiseuxSeries c) { return SeriesPoly{std::move(c)}; }

Fraction normalize(Fraction f)
{
    f.num = trimmed(f.num);
    f.den = trimmed(f.den);
    if (f.num.empty()) {
        return Fraction{constant(PuiseuxSeries(0.0)), constant(PuiseuxSeries(1.0))};
    }
    std::size_t shift = 0;
    while (f.num[shift].is_zero() && f.den[shift].is_zero()) {
        ++shift;
    }
    if (shift > 0) {
        f.num.erase(f.num.begin(), f.num.begin() + static_cast<std::ptrdiff_t>(shift));
        f.den.erase(f.den.begin(), f.den.begin() + static_cast<std::ptrdiff_t>(shift));
    }
    if (f.den.size() == 1 && f.den[0].is_exact() && f.den[0].terms().size() == 1) {
        const Term lead = f.den[0].terms().front();
        for (auto& c : f.num) {
            c = c.scaled(Complex(1.0) / lead.coef, -lead.exp);
        }
        f.den = constant(PuiseuxSeries(1.0));
    }
    return f;
}

Fraction add(const Fraction& a, const Fraction& b, double sign)
{
    Fraction r;
    if (a.den == b.den) {
        r.num = poly_add(a.num, poly_scale(b.num, PuiseuxSeries(sign)));
        r.den = a.den;
    } else {
        r.num = poly_add(poly_mul(a.num, b.den), poly_scale(poly_mul(b.num, a.den), PuiseuxSeries(sign)));
        r.den = poly_mul(a.den, b.den);
    }
    return normalize(r);
}

Fraction multiply(const Fraction& a, const Fraction& b)
{
    return normalize({poly_mul(a.num, b.num), poly_mul(a.den, b.den)});
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Fraction parse()
    {
        Fraction f = expr();
        skip_space();
        if (pos_ < text_.size()) {
            fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        }
        return f;
    }

private:
    [[noreturn]] void fail(const std::string& what) const
    {
        int line = 1;
        int col = 1;
        for (std::size_t k = 0; k < pos_ && k < text_.size(); ++k) {
            if (text_[k] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw Error(ErrorCode::SyntaxError,
                    "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + what);
    }

    void skip_space()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    bool accept(char c)
    {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c)
    {
        if (!accept(c)) {
            fail(std::string("expected '") + c + "'");
        }
    }

    Fraction expr()
    {
        Fraction acc = term();
        while (true) {
            if (accept('+')) {
                acc = add(acc, term(), 1.0);
            } else if (accept('-')) {
                acc = add(acc, term(), -1.0);
            } else {
                return acc;
            }
        }
    }

    Fraction term()
    {
        Fraction acc = unary();
        while (true) {
            if (accept('*')) {
                acc = multiply(acc, unary());
            } else if (accept('/')) {
                const std::size_t at = pos_;
                Fraction d = unary();
                if (trimmed(d.num).empty()) {
                    pos_ = at;
                    fail("division by zero");
                }
                acc = multiply(acc, Fraction{d.den, d.num});
            } else {
                return acc;
            }
        }
    }

    Fraction unary()
    {
        if (accept('-')) {
            Fraction f = unary();
            f.num = poly_scale(f.num, PuiseuxSeries(-1.0));
            return f;
        }
        if (accept('+')) {
            return unary();
        }
        return power();
    }

    std::int64_t integer()
    {
        skip_space();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
        if (start == pos_) {
            fail("expected an integer");
        }
        return std::stoll(std::string(text_.substr(start, pos_ - start)));
    }

    RatExp exponent()
    {
        if (accept('(')) {
            const bool neg = accept('-');
            std::int64_t num = integer();
            std::int64_t den = 1;
            if (accept('/')) {
                den = integer();
                if (den == 0) {
                    fail("zero denominator in exponent");
                }
            }
            expect(')');
            return RatExp(neg ? -num : num, den);
        }
        bool neg = false;
        if (accept('-')) {
            neg = true;
        } else {
            accept('+');
        }
        const std::int64_t k = integer();
        return RatExp(neg ? -k : k);
    }

    Fraction power()
    {
        skip_space();
        const std::size_t at = pos_;
        const bool is_t = pos_ < text_.size() && text_[pos_] == 't';
        Fraction base = atom();
        if (!accept('^')) {
            return base;
        }
        const RatExp e = exponent();
        if (is_t) {
            return Fraction{constant(PuiseuxSeries::monomial(1.0, e)), constant(PuiseuxSeries(1.0))};
        }
        if (e.den() != 1) {
            pos_ = at;
            fail("fractional exponent allowed on t only");
        }
        std::int64_t k = e.num();
        if (k < 0) {
            if (trimmed(base.num).empty()) {
                pos_ = at;
                fail("negative power of zero");
            }
            base = Fraction{base.den, base.num};
            k = -k;
        }
        Fraction r;
        r.num = constant(PuiseuxSeries(1.0));
        for (std::int64_t j = 0; j < k; ++j) {
            r = multiply(r, base);
        }
        return r;
    }

    Fraction atom()
    {
        skip_space();
        if (pos_ >= text_.size()) {
            fail("unexpected end of input");
        }
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Fraction f = expr();
            expect(')');
            return f;
        }
        if (c == 'z') {
            ++pos_;
            return Fraction{SeriesPoly{PuiseuxSeries(0.0), PuiseuxSeries(1.0)}, constant(PuiseuxSeries(1.0))};
        }
        if (c == 't') {
            ++pos_;
            return Fraction{constant(PuiseuxSeries::monomial(1.0, RatExp(1))), constant(PuiseuxSeries(1.0))};
        }
        if (c == 'i') {
            ++pos_;
            return Fraction{constant(PuiseuxSeries(Complex(0.0, 1.0))), constant(PuiseuxSeries(1.0))};
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            char* end = nullptr;
            const std::string copy(text_.substr(pos_));
            const double v = std::strtod(copy.c_str(), &end);
            const std::size_t used = static_cast<std::size_t>(end - copy.c_str());
            if (used == 0) {
                fail("malformed number");
            }
            pos_ += used;
            return Fraction{constant(PuiseuxSeries(v)), constant(PuiseuxSeries(1.0))};
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

std::string print_poly(const SeriesPoly& p)
{
    std::string out;
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (p[k].is_zero()) {
            continue;
        }
        if (!out.empty()) {
            out += " + ";
        }
        out += "(" + p[k].to_string() + ")";
        if (k == 1) {
            out += "*z";
        } else if (k > 1) {
            out += "*z^" + std::to_string(k);
        }
    }
    return out.empty() ? std::string("0") : out;
}

} // namespace

FamilySpec parse_family(std::string_view text, std::optional<int> declared_degree)
{
    Fraction f = Parser(text).parse();
    for (const auto& c : f.num) {
        if (!c.is_exact()) {
            throw Error(ErrorCode::SyntaxError, "coefficients must be exact");
        }
    }
    FamilySpec spec{std::string(text), RationalMap(trimmed(f.num), trimmed(f.den))};
    if (declared_degree && *declared_degree != spec.map.degree()) {
        throw Error(ErrorCode::DegreeMismatch, "declared degree " + std::to_string(*declared_degree)
                                                   + " but the family has degree " + std::to_string(spec.map.degree()));
    }
    return spec;
}

std::string print_family(const RationalMap& f)
{
    const SeriesPoly q = trimmed(f.q());
    if (q.size() == 1 && q[0].is_exact() && q[0].terms().size() == 1 && q[0].terms()[0].exp == RatExp(0)
        && q[0].terms()[0].coef == Complex(1.0)) {
        return print_poly(f.p());
    }
    return "(" + print_poly(f.p()) + ")/(" + print_poly(f.q()) + ")";
}

std::span<const BundledFamily> bundled_families()
{
    static constexpr BundledFamily list[] = {
        {"quadratic-pole", "z^2 + t^-1", FamilyClass::Quadratic, true},
        {"quadratic-good", "z^2 + t", FamilyClass::Quadratic, false},
        {"quadratic-rational-good", "(z^2 + t)/(1 + t*z)", FamilyClass::Quadratic, false},
        {"cubic-pole", "z^3 + z*t^-1", FamilyClass::CubicPolynomial, true},
        {"cubic-leading-t", "t*z^3 + z^2", FamilyClass::CubicPolynomial, true},
        {"cubic-attracting", "z^3 + z^2*t^-1", FamilyClass::CubicPolynomial, true},
        {"cubic-rational-a", "(z^3 + t^-1)/z", FamilyClass::CubicRational, true},
        {"cubic-rational-b", "(t*z^3 + 1)/z^2", FamilyClass::CubicRational, true},
        {"mcmullen", "z^2 + t/z^2", FamilyClass::Other, false},
    };
    return list;
}

} // namespace nadyn
