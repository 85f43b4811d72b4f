#include "saltbio/tier_cipher.hpp"

#include <array>
#include <sstream>

#include "saltbio/error.hpp"

namespace saltbio {

namespace mp = boost::multiprecision;

bool RsaParams::below_recommended_size() const {
  return mp::msb(p) + 1 < 2048 || mp::msb(q) + 1 < 2048;
}

bool is_prime(const BigInt& n) {
  static constexpr std::array<unsigned, 13> kWitnesses = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41};
  if (n < 2) return false;
  for (unsigned w : kWitnesses) {
    if (n == w) return true;
    if (n % w == 0) return false;
  }
  BigInt d = n - 1;
  unsigned s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (unsigned w : kWitnesses) {
    BigInt x = mp::powm(BigInt(w), d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (unsigned r = 1; r < s; ++r) {
      x = (x * x) % n;
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::optional<BigInt> mod_inverse(const BigInt& a, const BigInt& m) {
  if (m <= 1) return std::nullopt;
  BigInt old_r = a % m, r = m;
  BigInt old_s = 1, s = 0;
  if (old_r < 0) old_r += m;
  while (r != 0) {
    const BigInt quot = old_r / r;
    BigInt tmp = old_r - quot * r;
    old_r = r;
    r = tmp;
    tmp = old_s - quot * s;
    old_s = s;
    s = tmp;
  }
  if (old_r != 1) return std::nullopt;
  BigInt x = old_s % m;
  if (x < 0) x += m;
  return x;
}

RsaParams keygen(const BigInt& p, const BigInt& q, const BigInt& d) {
  if (!is_prime(p)) throw Error(Errc::parameter, "p = " + p.str() + " is not prime");
  if (!is_prime(q)) throw Error(Errc::parameter, "q = " + q.str() + " is not prime");
  if (p == q) throw Error(Errc::parameter, "p and q must be distinct");
  RsaParams k;
  k.p = p;
  k.q = q;
  k.n = p * q;
  k.m = (p - 1) * (q - 1);
  if (d <= 1 || d >= k.m) {
    throw Error(Errc::parameter, "d must satisfy 1 < d < " + k.m.str());
  }
  auto e = mod_inverse(d, k.m);
  if (!e) {
    throw Error(Errc::no_inverse,
                "d = " + d.str() + " has no inverse modulo " + k.m.str() + " (gcd = " + BigInt(mp::gcd(d, k.m)).str() + ")");
  }
  k.d = d;
  k.e = *e;
  return k;
}

std::string_view to_string(SaltCombine mode) {
  return mode == SaltCombine::multiply ? "multiply" : "concat_digits";
}

std::string_view to_string(Gate gate) {
  switch (gate) {
    case Gate::OR: return "OR";
    case Gate::AND: return "AND";
    case Gate::XOR: return "XOR";
  }
  return "?";
}

SaltCombine salt_combine_from_string(std::string_view s) {
  if (s == "multiply") return SaltCombine::multiply;
  if (s == "concat_digits" || s == "concat") return SaltCombine::concat_digits;
  throw Error(Errc::config, "unknown salt combine mode: " + std::string(s));
}

Gate gate_from_string(std::string_view s) {
  if (s == "OR" || s == "or") return Gate::OR;
  if (s == "AND" || s == "and") return Gate::AND;
  if (s == "XOR" || s == "xor") return Gate::XOR;
  throw Error(Errc::config, "unknown gate: " + std::string(s));
}

BigInt ascii_digits(std::string_view password) {
  if (password.empty()) throw Error(Errc::domain, "password must not be empty");
  std::string digits;
  digits.reserve(password.size() * 3);
  for (char c : password) {
    const auto code = static_cast<unsigned char>(c);
    if (code < 32 || code > 126) throw Error(Errc::domain, "password must be printable ASCII");
    digits += std::to_string(code);
  }
  return BigInt(digits);
}

BigInt salt_combine(const BigInt& value, const BigInt& salt, SaltCombine mode) {
  if (value < 0 || salt < 0) throw Error(Errc::domain, "salt_combine requires non-negative operands");
  if (mode == SaltCombine::multiply) return value * salt;
  return BigInt(value.str() + salt.str());
}

BigInt scale_by_e(const BigInt& value, const BigInt& e) {
  if (e < 1) throw Error(Errc::parameter, "scaling factor must be >= 1");
  if (value < 0) throw Error(Errc::domain, "scale_by_e requires a non-negative value");
  return value * e;
}

BigInt round_half_away(const Rational& r) {
  const BigInt num = mp::numerator(r);
  const BigInt den = mp::denominator(r);  // always positive
  const BigInt mag = (2 * mp::abs(num) + den) / (2 * den);
  return num < 0 ? BigInt(-mag) : mag;
}

SeriesResult sine_tail(const BigInt& x, unsigned k) {
  if (x < 0) throw Error(Errc::domain, "sine_tail requires x >= 0");
  // term_i = x^(2i+1)/(2i+1)!, built incrementally as a numerator/denominator pair.
  const BigInt x2 = x * x;
  BigInt power = x;
  BigInt factorial = 1;
  Rational sum = 0;
  for (unsigned i = 0; i <= k; ++i) {
    if (i > 0) {
      power *= x2;
      factorial *= BigInt(2 * i) * BigInt(2 * i + 1);
    }
    const Rational term(power, factorial);
    if (i % 2 == 0) {
      sum += term;
    } else {
      sum -= term;
    }
  }
  SeriesResult res;
  res.template_value = mp::abs(round_half_away(sum));
  res.sum = std::move(sum);
  return res;
}

StageTrace encrypt_password(std::string_view password, const BigInt& salt, const PipelineConfig& cfg) {
  StageTrace t;
  t.ascii_value = ascii_digits(password);
  t.combined_value = salt_combine(t.ascii_value, salt, cfg.salt_combine);
  t.scaled_value = scale_by_e(t.combined_value, cfg.scale_factor());
  t.pre_code_bits = to_bits(t.scaled_value, cfg.radix);
  t.coded_bits = encode_4b5b(t.pre_code_bits);
  t.recoded_value = from_bits(t.coded_bits);
  auto series = sine_tail(t.recoded_value, cfg.series_terms);
  t.series_sum = std::move(series.sum);
  t.template_value = std::move(series.template_value);
  return t;
}

bool trace_consistent(const StageTrace& t, std::string_view password, const BigInt& salt,
                      const PipelineConfig& cfg) {
  try {
    if (t.ascii_value != ascii_digits(password)) return false;
    if (t.combined_value != salt_combine(t.ascii_value, salt, cfg.salt_combine)) return false;
    if (t.scaled_value != scale_by_e(t.combined_value, cfg.scale_factor())) return false;
    if (t.pre_code_bits != to_bits(t.scaled_value, cfg.radix)) return false;
    if (t.coded_bits != encode_4b5b(t.pre_code_bits)) return false;
    if (t.recoded_value != from_bits(t.coded_bits)) return false;
    const auto series = sine_tail(t.recoded_value, cfg.series_terms);
    return t.series_sum == series.sum && t.template_value == series.template_value;
  } catch (const Error&) {
    return false;
  }
}

FusedTemplate template_from_bits(const BitString& fused, const PipelineConfig& cfg) {
  if (fused.empty()) throw Error(Errc::domain, "fused bits must not be empty");
  FusedTemplate out;
  out.recoded_value = from_bits(encode_4b5b(fused));
  out.template_value = sine_tail(out.recoded_value, cfg.series_terms).template_value;
  return out;
}

std::string format_trace(const StageTrace& t) {
  std::ostringstream os;
  os << "ascii_value: " << t.ascii_value << '\n'
     << "combined_value: " << t.combined_value << '\n'
     << "scaled_value: " << t.scaled_value << '\n'
     << "pre_code_bits: " << t.pre_code_bits.str() << '\n'
     << "coded_bits: " << t.coded_bits.str() << '\n'
     << "recoded_value: " << t.recoded_value << '\n'
     << "series_sum: " << to_string(t.series_sum) << '\n'
     << "template: " << t.template_value << '\n';
  return os.str();
}

}  // namespace saltbio
