#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "saltbio/bigint.hpp"
#include "saltbio/error.hpp"

namespace saltbio {

/// Ordered bit sequence, most-significant bit first. Leading zeros are
/// significant: "01" and "1" are different strings.
class BitString {
 public:
  BitString() = default;

  /// Parses ASCII '0'/'1'. Throws Error(format) on any other character.
  static BitString parse(std::string_view text);
  static BitString zeros(std::size_t n);

  std::size_t size() const noexcept { return bits_.size(); }
  bool empty() const noexcept { return bits_.empty(); }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  void set(std::size_t i, bool v) { bits_[i] = v ? 1 : 0; }

  void push_back(bool v) { bits_.push_back(v ? 1 : 0); }
  BitString& append(const BitString& tail);

  /// Copy of [pos, pos + len).
  BitString slice(std::size_t pos, std::size_t len) const;
  /// Left-pads with zeros up to `width` bits (no-op when already wider).
  BitString left_padded(std::size_t width) const;

  std::size_t popcount() const noexcept;
  std::string str() const;

  friend bool operator==(const BitString&, const BitString&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

BitString operator+(BitString head, const BitString& tail);

enum class Radix : std::uint8_t { binary = 2, octal = 8, hex = 16 };

/// Throws Error(config) unless value is 2, 8 or 16.
Radix radix_from_int(int value);

/// Radix 2: minimal binary expansion ("0" for zero). Radix 8/16: each digit
/// of the base-8/16 expansion as a fixed 3-/4-bit group.
BitString to_bits(const BigInt& n, Radix radix = Radix::binary);

/// Base-2 value of a non-empty bit string. Throws Error(domain) when empty.
BigInt from_bits(const BitString& bits);

/// Thrown by SubstitutionTable::decode for a group missing from the table.
class InvalidSymbolError : public Error {
 public:
  InvalidSymbolError(std::size_t group_index, const std::string& symbol);

  std::size_t group_index() const noexcept { return group_index_; }

 private:
  std::size_t group_index_;
};

/// Block substitution code mapping every `in_width`-bit group to an
/// `out_width`-bit symbol. The forward map must be total and injective.
class SubstitutionTable {
 public:
  /// `symbols[v]` is the code for input group value v; there must be exactly
  /// 2^in_width entries, each of `out_width` bits.
  SubstitutionTable(unsigned in_width, unsigned out_width, std::vector<std::string_view> symbols);

  /// The 4B/5B nibble table.
  static const SubstitutionTable& four_b_five_b();

  unsigned in_width() const noexcept { return in_width_; }
  unsigned out_width() const noexcept { return out_width_; }

  /// Symbol for a group value; value must be < 2^in_width.
  const BitString& forward(std::uint32_t group) const { return forward_.at(group); }

  /// Left-pads to a multiple of in_width, then substitutes each group.
  BitString encode(const BitString& bits) const;
  /// Inverse of encode, up to the left padding. Throws Error(framing) for a
  /// length that is not a multiple of out_width, InvalidSymbolError otherwise.
  BitString decode(const BitString& coded) const;

 private:
  unsigned in_width_;
  unsigned out_width_;
  std::vector<BitString> forward_;
  // Indexed by symbol value; -1 marks a symbol outside the table.
  std::vector<std::int32_t> reverse_;
};

BitString encode_4b5b(const BitString& bits);
BitString decode_4b5b(const BitString& coded);

}  // namespace saltbio
