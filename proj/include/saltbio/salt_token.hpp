#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace saltbio {

/// Rotating numeric code generator, one code per `step_seconds` window.
struct SaltDevice {
  std::uint64_t seed = 0;
  int digits = 6;
  std::int64_t step_seconds = 60;

  /// Throws Error(parameter) unless 4 <= digits <= 9 and step_seconds >= 1.
  static SaltDevice make(std::uint64_t seed, int digits = 6, std::int64_t step_seconds = 60);

  std::int64_t step_of(std::int64_t unix_time) const { return unix_time / step_seconds; }

  friend bool operator==(const SaltDevice&, const SaltDevice&) = default;
};

/// 64-bit finalizer applied to (seed, step).
std::uint64_t salt_mix(std::uint64_t seed, std::uint64_t step);

/// Code for an explicit step index.
std::string code_for_step(const SaltDevice& dev, std::int64_t step);

/// Code for the window containing unix_time (>= 0), zero-padded to dev.digits.
std::string code_at(const SaltDevice& dev, std::int64_t unix_time);

struct SaltValidation {
  bool accepted = false;
  /// Step of the matched code minus the step of unix_time.
  std::optional<int> offset;
};

/// Accepts `code` if it equals the code of any step within +-skew_steps of
/// unix_time. Smaller |offset| wins; ties prefer the earlier step.
/// Throws Error(format) unless code is exactly dev.digits decimal digits.
SaltValidation validate(const SaltDevice& dev, std::string_view code, std::int64_t unix_time, int skew_steps = 1);

}  // namespace saltbio
