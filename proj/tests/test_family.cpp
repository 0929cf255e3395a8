#include "test_main.hpp"

#include "nadyn/family.hpp"

using namespace nadyn;

namespace {

ErrorCode error_of(const char* text, std::optional<int> degree = std::nullopt)
{
    try {
        parse_family(text, degree);
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::PreconditionFailed;
}

std::string message_of(const char* text)
{
    try {
        parse_family(text);
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

bool same_map(const RationalMap& a, const RationalMap& b)
{
    return trimmed(a.p()) == trimmed(b.p()) && trimmed(a.q()) == trimmed(b.q()) && a.degree() == b.degree();
}

} // namespace

TEST_CASE("parsing polynomial families")
{
    const RationalMap f = parse_family("z^2 + t^-1").map;
    CHECK(f.degree() == 2);
    CHECK(f.is_polynomial());
    CHECK(f.p()[0].to_string() == "1*t^-1");
    CHECK(f.p()[1].is_zero());
    CHECK(f.p()[2].to_string() == "1");

    const RationalMap g = parse_family("z^3 + z*t^-1").map;
    CHECK(g.degree() == 3);
    CHECK(g.p()[1].to_string() == "1*t^-1");

    const RationalMap h = parse_family("2.5*i*z^2 - (1 + t)*z").map;
    CHECK(h.p()[2].to_string() == "(2.5*i)");
    CHECK(h.p()[1].to_string() == "-1 + -1*t^1");

    const RationalMap r = parse_family("z^2 + t^(1/2) - t^(-3/2)").map;
    CHECK(r.p()[0].to_string() == "-1*t^(-3/2) + 1*t^(1/2)");
}

TEST_CASE("rational families are normalized")
{
    // McMullen: z^2 + t/z^2 = (z^4 + t)/z^2.
    const RationalMap m = parse_family("z^2 + t/z^2").map;
    CHECK(m.degree() == 4);
    CHECK(degree(m.p()) == 4);
    CHECK(degree(m.q()) == 2);
    CHECK(m.p()[0].to_string() == "1*t^1");
    CHECK(m.q()[2].to_string() == "1");
    CHECK(m.q()[0].is_zero());

    // A common power of z cancels: (z^3 + z)/z^2 = (z^2 + 1)/z.
    const RationalMap c = parse_family("(z^3 + z)/z^2").map;
    CHECK(c.degree() == 2);
    CHECK(degree(c.q()) == 1);

    // A monomial denominator in t is divided out.
    const RationalMap d = parse_family("(z^2 + 1)/(2*t)").map;
    CHECK(d.is_polynomial());
    CHECK(d.p()[2].to_string() == "0.5*t^-1");

    const RationalMap e = parse_family("(t*z^3 + 1)/z^2").map;
    CHECK(e.degree() == 3);
    CHECK(degree(e.q()) == 2);
}

TEST_CASE("print and parse round trip")
{
    const char* families[] = {"z^2 + t^-1",       "z^3 + z*t^-1",        "t*z^3 + z^2",
                              "z^2 + t/z^2",      "(z^2 + t)/(1 + t*z)", "(z^3 + t^-1)/z",
                              "(t*z^3 + 1)/z^2",  "z^2 - 0.75",          "(0.5 - 2*i)*z^2 + t^(2/3)*z + i",
                              "z^2 + t^(-1/2)*z"};
    for (const char* text : families) {
        CAPTURE(text);
        const RationalMap f = parse_family(text).map;
        const std::string printed = print_family(f);
        CAPTURE(printed);
        CHECK(same_map(parse_family(printed).map, f));
        CHECK(print_family(parse_family(printed).map) == printed);
    }
}

TEST_CASE("syntax errors carry line and column")
{
    CHECK(error_of("z^2 +") == ErrorCode::SyntaxError);
    CHECK(message_of("z^2 +").find("line 1, column 6") != std::string::npos);
    CHECK(error_of("z^2 $ t") == ErrorCode::SyntaxError);
    CHECK(message_of("z^2 $ t").find("line 1, column 5") != std::string::npos);
    CHECK(message_of("z^2 +\n  (t").find("line 2, column 5") != std::string::npos);
    CHECK(error_of("z^(1/2)") == ErrorCode::SyntaxError);
    CHECK(error_of("z/0") == ErrorCode::SyntaxError);
    CHECK(error_of("t^(1/0)") == ErrorCode::SyntaxError);
    CHECK(error_of("") == ErrorCode::SyntaxError);
    CHECK(error_of("x^2") == ErrorCode::SyntaxError);
}

TEST_CASE("declared degree must match")
{
    CHECK(parse_family("z^2 + t/z^2", 4).map.degree() == 4);
    CHECK(error_of("z^2 + t/z^2", 2) == ErrorCode::DegreeMismatch);
    CHECK(error_of("z^3 + t", 2) == ErrorCode::DegreeMismatch);
}
