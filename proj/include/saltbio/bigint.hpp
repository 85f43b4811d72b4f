#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace saltbio {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Parses a non-negative decimal integer; throws Error(format) on anything else.
BigInt parse_decimal(std::string_view text);

inline std::string to_decimal(const BigInt& v) { return v.str(); }

/// "num/den" in lowest terms, or just "num" when the denominator is 1.
std::string to_string(const Rational& r);

}  // namespace saltbio
