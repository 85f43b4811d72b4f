#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "saltbio/bigint.hpp"
#include "saltbio/bitcodec.hpp"

namespace saltbio {

/// Toy-scale RSA key material. Invariants: p, q distinct primes; n = p*q;
/// m = (p-1)(q-1); gcd(d, m) = 1; d*e = 1 (mod m).
struct RsaParams {
  BigInt p, q, n, m, d, e;

  /// True when either prime is shorter than the 2048-bit production floor.
  bool below_recommended_size() const;
};

/// Deterministic Miller-Rabin (fixed witness set, exact below 3.3e24; a
/// strong probable-prime test above that).
bool is_prime(const BigInt& n);

/// Extended Euclid. Returns x in [0, m) with a*x = 1 (mod m), or nullopt when
/// gcd(a, m) != 1.
std::optional<BigInt> mod_inverse(const BigInt& a, const BigInt& m);

/// Builds RsaParams with e = d^-1 mod (p-1)(q-1).
/// Throws Error(parameter) for non-prime or equal p, q or d outside (1, m),
/// Error(no_inverse) when gcd(d, m) != 1.
RsaParams keygen(const BigInt& p, const BigInt& q, const BigInt& d);

enum class SaltCombine : std::uint8_t { multiply, concat_digits };
enum class Gate : std::uint8_t { OR, AND, XOR };

std::string_view to_string(SaltCombine mode);
std::string_view to_string(Gate gate);
SaltCombine salt_combine_from_string(std::string_view s);
Gate gate_from_string(std::string_view s);

/// Tunables of the five-stage encoding pipeline. Rounding is always
/// half-away-from-zero.
struct PipelineConfig {
  RsaParams rsa = keygen(11, 13, 7);
  /// Multiplier for the scaling stage when it must differ from rsa.e (the
  /// worked HELLO example scales by 40).
  std::optional<BigInt> scale_override;
  SaltCombine salt_combine = SaltCombine::multiply;
  Radix radix = Radix::binary;
  unsigned series_terms = 3;
  Gate gate = Gate::OR;

  const BigInt& scale_factor() const { return scale_override ? *scale_override : rsa.e; }
};

/// Every intermediate of one encrypt_password run.
struct StageTrace {
  BigInt ascii_value;
  BigInt combined_value;
  BigInt scaled_value;
  BitString pre_code_bits;
  BitString coded_bits;
  BigInt recoded_value;
  Rational series_sum;
  BigInt template_value;

  friend bool operator==(const StageTrace&, const StageTrace&) = default;
};

/// Decimal concatenation of the ASCII codes of a printable-ASCII password.
BigInt ascii_digits(std::string_view password);

BigInt salt_combine(const BigInt& value, const BigInt& salt, SaltCombine mode);

/// value * e; e must be >= 1.
BigInt scale_by_e(const BigInt& value, const BigInt& e);

struct SeriesResult {
  Rational sum;
  BigInt template_value;
};

/// Exact sum_{i=0..k} (-1)^i x^(2i+1)/(2i+1)! and |round_half_away(sum)|.
SeriesResult sine_tail(const BigInt& x, unsigned k);

/// Half-away-from-zero rounding of an exact rational.
BigInt round_half_away(const Rational& r);

StageTrace encrypt_password(std::string_view password, const BigInt& salt, const PipelineConfig& cfg);

/// Re-runs each stage from the previous field and reports whether every
/// field of `trace` matches. `password` is checked against ascii_value.
bool trace_consistent(const StageTrace& trace, std::string_view password, const BigInt& salt,
                      const PipelineConfig& cfg);

struct FusedTemplate {
  BigInt recoded_value;
  BigInt template_value;

  friend bool operator==(const FusedTemplate&, const FusedTemplate&) = default;
};

/// 4B/5B-codes fused biometric/credential bits, reads them back as an
/// integer and runs the series finalizer.
FusedTemplate template_from_bits(const BitString& fused, const PipelineConfig& cfg);

/// Labeled one-line-per-stage rendering used by the CLI and fixtures.
std::string format_trace(const StageTrace& trace);

}  // namespace saltbio
