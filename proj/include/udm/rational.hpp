#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>

namespace udm {

/// Exact rational with arbitrary-precision integer parts. All series and
/// curvature-polynomial coefficients use this type; doubles enter only at
/// the numerical boundary (curve evaluation, fitting).
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Parses "p/q" or "p" (optionally signed). Throws std::invalid_argument on
/// malformed input or zero denominator.
Rational parse_rational(std::string_view text);

/// Formats as "p/q", or "p" when the denominator is 1.
std::string rational_to_string(const Rational& q);

double rational_to_double(const Rational& q);

Rational factorial(int n);

}  // namespace udm
