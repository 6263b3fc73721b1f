#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace deltamap {

/// Arbitrary-precision rational; every cost, marginal and LP value is one.
using Rational = mpq_class;

/// Parses "p/q", an integer, or a decimal with optional exponent ("-1.25e2")
/// into an exact rational. Throws std::invalid_argument on malformed text.
Rational parse_rational(std::string_view text);

/// Canonical text form: "p" or "p/q" in lowest terms.
std::string to_string(const Rational& value);

inline int sign(const Rational& value) { return sgn(value); }

inline Rational abs_value(const Rational& value) { return abs(value); }

inline double to_double(const Rational& value) { return value.get_d(); }

/// Decimal text: exact when the denominator has no prime factors besides 2
/// and 5, otherwise 17 significant digits.
std::string to_decimal(const Rational& value);

/// Exact rational image of a double (every finite double is a dyadic rational).
Rational from_double(double value);

/// L^k as an exact rational.
Rational power(int base, std::size_t exponent);

}  // namespace deltamap
