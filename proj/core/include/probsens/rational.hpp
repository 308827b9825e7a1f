#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace probsens {

using Rational = mpq_class;

inline bool is_zero(const Rational& q) { return sgn(q) == 0; }

inline bool is_integer(const Rational& q) { return q.get_den() == 1; }

/// Canonical text: "3", "-3/4".
std::string to_string(const Rational& q);

/// Accepts integers, fractions "a/b" and decimals "0.25" (exactly).
Rational parse_rational(std::string_view text);

Rational pow(const Rational& base, long exponent);

/// Exact square root when `q` is the square of a rational.
bool exact_sqrt(const Rational& q, Rational& root);

}  // namespace probsens
