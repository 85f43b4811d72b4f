#pragma once
// Straight-line reference for the encoding pipeline. Uses GMP and its own
// copy of the 4B/5B table so it shares no code path with the library.

#include <gmpxx.h>

#include <map>
#include <string>

namespace oracle {

inline mpz_class ascii_digits(const std::string& password) {
  std::string digits;
  for (unsigned char c : password) digits += std::to_string(static_cast<unsigned>(c));
  return mpz_class(digits, 10);
}

inline std::string binary(const mpz_class& n) { return n.get_str(2); }

// Each base-8/16 digit as a fixed 3/4-bit group.
inline std::string radix_bits(const mpz_class& n, int radix) {
  if (radix == 2) return binary(n);
  const std::string digits = n.get_str(radix);
  const int width = radix == 8 ? 3 : 4;
  std::string out;
  for (char c : digits) {
    const int v = std::stoi(std::string(1, c), nullptr, radix);
    for (int b = width - 1; b >= 0; --b) out += ((v >> b) & 1) ? '1' : '0';
  }
  return out;
}

inline std::string encode_4b5b(std::string bits) {
  static const std::map<std::string, std::string> table = {
      {"0000", "11110"}, {"0001", "01001"}, {"0010", "10100"}, {"0011", "10101"},
      {"0100", "01010"}, {"0101", "01011"}, {"0110", "01110"}, {"0111", "01111"},
      {"1000", "10010"}, {"1001", "10011"}, {"1010", "10110"}, {"1011", "10111"},
      {"1100", "11010"}, {"1101", "11011"}, {"1110", "11100"}, {"1111", "11101"},
  };
  while (bits.size() % 4 != 0) bits.insert(bits.begin(), '0');
  std::string out;
  for (std::size_t i = 0; i < bits.size(); i += 4) out += table.at(bits.substr(i, 4));
  return out;
}

inline mpz_class factorial(unsigned n) {
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), n);
  return f;
}

inline mpq_class sine_sum(const mpz_class& x, unsigned k) {
  mpq_class sum = 0;
  for (unsigned i = 0; i <= k; ++i) {
    mpz_class power;
    mpz_pow_ui(power.get_mpz_t(), x.get_mpz_t(), 2 * i + 1);
    mpq_class term(power, factorial(2 * i + 1));
    term.canonicalize();
    if (i % 2 == 0) {
      sum += term;
    } else {
      sum -= term;
    }
  }
  return sum;
}

// |round half away from zero|: floor(|q| + 1/2).
inline mpz_class abs_rounded(const mpq_class& q) {
  mpq_class a = abs(q) + mpq_class(1, 2);
  mpz_class out;
  mpz_fdiv_q(out.get_mpz_t(), a.get_num_mpz_t(), a.get_den_mpz_t());
  return out;
}

struct Trace {
  mpz_class ascii, combined, scaled;
  std::string pre_bits, coded_bits;
  mpz_class recoded;
  mpq_class sum;
  mpz_class template_value;
};

inline Trace pipeline(const std::string& password, const mpz_class& salt, const mpz_class& e, int radix,
                      unsigned k, bool concat) {
  Trace t;
  t.ascii = ascii_digits(password);
  t.combined = concat ? mpz_class(t.ascii.get_str() + salt.get_str(), 10) : mpz_class(t.ascii * salt);
  t.scaled = t.combined * e;
  t.pre_bits = radix_bits(t.scaled, radix);
  t.coded_bits = encode_4b5b(t.pre_bits);
  t.recoded = mpz_class(t.coded_bits, 2);
  t.sum = sine_sum(t.recoded, k);
  t.template_value = abs_rounded(t.sum);
  return t;
}

// Fused-bits entry: 4B/5B, base-2 read-back, series.
inline mpz_class fused_template(const std::string& fused, unsigned k) {
  return abs_rounded(sine_sum(mpz_class(encode_4b5b(fused), 2), k));
}

inline std::string to_str(const mpq_class& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

}  // namespace oracle
