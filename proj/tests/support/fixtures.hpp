#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "saltbio/auth_core.hpp"
#include "saltbio/biometric.hpp"

namespace fixtures {

inline saltbio::BiometricSample random_sample(std::mt19937_64& rng, std::size_t bytes = 32,
                                              saltbio::Modality m = saltbio::Modality::fingerprint) {
  saltbio::BiometricSample s;
  s.modality = m;
  s.blob.resize(bytes);
  for (auto& b : s.blob) b = static_cast<std::uint8_t>(rng() & 0xFF);
  return s;
}

/// Sample whose 256 feature bits differ from `base` in exactly the given
/// bit positions (base must be 32 bytes, so features are the blob itself).
inline saltbio::BiometricSample with_flips(const saltbio::BiometricSample& base, const std::vector<std::size_t>& bits) {
  saltbio::BiometricSample s = base;
  for (std::size_t i : bits) s.blob[i / 8] ^= static_cast<std::uint8_t>(0x80u >> (i % 8));
  return s;
}

/// 32-byte sample whose second half is zero, so OR fusion leaves the
/// credential bits visible in the fused template.
inline saltbio::BiometricSample clean_tail_sample(std::mt19937_64& rng,
                                                  saltbio::Modality m = saltbio::Modality::fingerprint) {
  auto s = random_sample(rng, 32, m);
  for (std::size_t i = 16; i < 32; ++i) s.blob[i] = 0;
  return s;
}

inline saltbio::BitString random_bits(std::mt19937_64& rng, std::size_t n) {
  saltbio::BitString b;
  for (std::size_t i = 0; i < n; ++i) b.push_back((rng() & 1) != 0);
  return b;
}

/// One server's store, in-memory log and authenticator.
struct Rig {
  explicit Rig(std::string id = "S1", saltbio::AuthPolicy policy = {}, saltbio::StoreLimits limits = {})
      : store(limits), auth(std::move(id), store, log, {}, policy) {}
  saltbio::TemplateStore store;
  saltbio::AuditLog log;
  saltbio::Authenticator auth;
};

inline saltbio::EnrollmentRequest request(std::string user, std::vector<saltbio::BiometricSample> samples,
                                          std::uint64_t seed = 0x5EED) {
  saltbio::EnrollmentRequest r;
  r.user_id = std::move(user);
  r.samples = std::move(samples);
  r.password = "crisopher2101";
  r.eam_password = "break-glass";
  r.seed = seed;
  return r;
}

}  // namespace fixtures
