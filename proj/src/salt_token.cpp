#include "saltbio/salt_token.hpp"

#include <cstdlib>

#include "saltbio/error.hpp"

namespace saltbio {

SaltDevice SaltDevice::make(std::uint64_t seed, int digits, std::int64_t step_seconds) {
  if (digits < 4 || digits > 9) throw Error(Errc::parameter, "salt code digits must be in [4, 9]");
  if (step_seconds < 1) throw Error(Errc::parameter, "salt step must be at least one second");
  return SaltDevice{seed, digits, step_seconds};
}

std::uint64_t salt_mix(std::uint64_t seed, std::uint64_t step) {
  std::uint64_t u = seed ^ (step * 0x9E3779B97F4A7C15ULL);
  u = (u ^ (u >> 33)) * 0xBF58476D1CE4E5B9ULL;
  u = (u ^ (u >> 29)) * 0x94D049BB133111EBULL;
  return u ^ (u >> 32);
}

std::string code_for_step(const SaltDevice& dev, std::int64_t step) {
  std::uint64_t modulus = 1;
  for (int i = 0; i < dev.digits; ++i) modulus *= 10;
  std::string code = std::to_string(salt_mix(dev.seed, static_cast<std::uint64_t>(step)) % modulus);
  code.insert(0, static_cast<std::size_t>(dev.digits) - code.size(), '0');
  return code;
}

std::string code_at(const SaltDevice& dev, std::int64_t unix_time) {
  if (unix_time < 0) throw Error(Errc::domain, "unix time must be non-negative");
  return code_for_step(dev, dev.step_of(unix_time));
}

SaltValidation validate(const SaltDevice& dev, std::string_view code, std::int64_t unix_time, int skew_steps) {
  if (code.size() != static_cast<std::size_t>(dev.digits)) {
    throw Error(Errc::format, "salt code must have exactly " + std::to_string(dev.digits) + " digits");
  }
  for (char c : code) {
    if (c < '0' || c > '9') throw Error(Errc::format, "salt code must be decimal");
  }
  if (unix_time < 0) throw Error(Errc::domain, "unix time must be non-negative");
  const std::int64_t now = dev.step_of(unix_time);
  for (int dist = 0; dist <= skew_steps; ++dist) {
    for (int offset : {-dist, dist}) {
      const std::int64_t step = now + offset;
      if (step < 0) continue;
      if (code_for_step(dev, step) == code) return {true, offset};
      if (dist == 0) break;
    }
  }
  return {false, std::nullopt};
}

}  // namespace saltbio
