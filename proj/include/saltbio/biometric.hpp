#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "saltbio/bigint.hpp"
#include "saltbio/bitcodec.hpp"
#include "saltbio/tier_cipher.hpp"

namespace saltbio {

enum class Modality : std::uint8_t { fingerprint, iris, voice, other };

std::string_view to_string(Modality m);
Modality modality_from_string(std::string_view s);

/// Simulated sensor output.
struct BiometricSample {
  Modality modality = Modality::fingerprint;
  std::vector<std::uint8_t> blob;
};

/// Fixed-length feature bits extracted from a sample.
struct FeatureTemplate {
  BitString bits;
  Modality modality = Modality::fingerprint;

  std::size_t length() const noexcept { return bits.size(); }

  friend bool operator==(const FeatureTemplate&, const FeatureTemplate&) = default;
};

inline constexpr std::size_t kDefaultFeatureLength = 256;

/// The blob's bits (MSB first per byte), repeated cyclically and truncated to
/// `length` bits. Throws Error(parameter) unless length is a positive multiple
/// of 8, Error(domain) for an empty blob.
FeatureTemplate feature_bits(const BiometricSample& sample, std::size_t length = kDefaultFeatureLength);

/// to_bits(ascii_digits(password)) followed by to_bits(salt code value).
BitString credential_bits(std::string_view password, std::string_view salt_code);
BitString credential_bits(const BigInt& password_digits, std::string_view salt_code);

/// Positionwise gate after left-padding the shorter operand with zeros.
BitString fuse(const BitString& bio, const BitString& cred, Gate gate = Gate::OR);

std::size_t hamming_distance(const BitString& a, const BitString& b);

struct MatchResult {
  bool accepted = false;
  double distance = 0.0;
};

/// Normalized Hamming distance; accepted iff distance <= tau.
/// Throws Error(comparison) on length or modality mismatch.
MatchResult match(const FeatureTemplate& ref, const FeatureTemplate& probe, double tau);

/// Template file: "L=<int> modality=<tag>" then the 0/1 string.
void write_template(std::ostream& os, const FeatureTemplate& t);
FeatureTemplate read_template(std::istream& is);

/// Raw-bytes sample file.
BiometricSample read_sample_file(const std::string& path, Modality modality);
void write_sample_file(const std::string& path, const BiometricSample& sample);

}  // namespace saltbio
