#pragma once

#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace hopf {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Canonical "num/den" rendering (denominator always present, lowest terms).
std::string to_string(const Rational& q);

// Accepts "n" or "n/d" with optional sign; throws ParseError.
Rational parse_rational(const std::string& s);

}  // namespace hopf
