#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace cubiclab {

/// Arbitrary-precision rational scalar. Every Cantor-set endpoint and every
/// N-map composition is carried in this type so identities hold with zero
/// rounding error.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

double to_double(const Rational& q);
std::string numerator_string(const Rational& q);
std::string denominator_string(const Rational& q);

/// "p/q" (or "p" when the denominator is 1).
std::string to_string(const Rational& q);

/// Parses "p/q", "p", or a finite decimal such as "-0.125".
Rational parse_rational(const std::string& text);

/// 3^k as an exact integer.
BigInt pow3(unsigned k);

}  // namespace cubiclab
