#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "nadyn/rational_map.hpp"

namespace nadyn {

/// A family f_t = P_t / Q_t read from text.
///
///   family  = expr ;
///   expr    = term { ("+" | "-") term } ;
///   term    = unary { ("*" | "/") unary } ;
///   unary   = ["-" | "+"] power ;
///   power   = atom [ "^" exponent ] ;
///   exponent= ["-" | "+"] integer | "(" ["-"] integer ["/" integer] ")" ;
///   atom    = number | "i" | "z" | "t" | "(" expr ")" ;
///
/// Rational exponents are accepted on t only. Common powers of z in P and
/// Q are cancelled and a monomial denominator in t is divided out.
struct FamilySpec {
    std::string source;
    RationalMap map;
};

FamilySpec parse_family(std::string_view text, std::optional<int> declared_degree = std::nullopt);

/// Canonical text; parse_family(print_family(f)) reproduces f.
std::string print_family(const RationalMap& f);

enum class FamilyClass { Quadratic, CubicPolynomial, Polynomial, CubicRational, Other };

struct BundledFamily {
    const char* name;
    const char* text;
    FamilyClass family_class;
    bool degenerating; // some multiplier has a pole
};

/// Example families shipped with the library.
std::span<const BundledFamily> bundled_families();

} // namespace nadyn
