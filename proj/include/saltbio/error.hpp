#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace saltbio {

/// Category of a failure raised by the toolkit.
enum class Errc : std::uint8_t {
  config,         // unsupported radix, gate, mode, ...
  domain,         // input outside an operation's domain
  parameter,      // bad numeric parameter (L, capacity, attempts, ...)
  framing,        // coded bit length not a multiple of the symbol width
  invalid_symbol, // coded group absent from the substitution table
  no_inverse,     // gcd(d, m) != 1
  comparison,     // templates of different length or modality
  conflict,       // duplicate user
  capacity,       // reference or user capacity exceeded
  not_found,
  format,         // malformed code, file line, wire message
  io,
  referral,       // unknown peer
  transport,      // peer unreachable
  version,
  session,        // EAM session expired or superseded
  denied,         // EAM gate refused
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace saltbio
