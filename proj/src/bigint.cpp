#include "saltbio/bigint.hpp"

#include "saltbio/error.hpp"

namespace saltbio {

BigInt parse_decimal(std::string_view text) {
  if (text.empty()) throw Error(Errc::format, "empty decimal integer");
  BigInt v = 0;
  for (char c : text) {
    if (c < '0' || c > '9') throw Error(Errc::format, "not a decimal integer: " + std::string(text));
    v = v * 10 + (c - '0');
  }
  return v;
}

std::string to_string(const Rational& r) {
  const BigInt den = boost::multiprecision::denominator(r);
  std::string s = boost::multiprecision::numerator(r).str();
  if (den != 1) s += "/" + den.str();
  return s;
}

}  // namespace saltbio
