#include "saltbio/bitcodec.hpp"

#include <algorithm>

namespace saltbio {

BitString BitString::parse(std::string_view text) {
  BitString out;
  out.bits_.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c != '0' && c != '1') {
      throw Error(Errc::format, "bit string has non-binary character at position " + std::to_string(i));
    }
    out.bits_.push_back(c == '1' ? 1 : 0);
  }
  return out;
}

BitString BitString::zeros(std::size_t n) {
  BitString out;
  out.bits_.assign(n, 0);
  return out;
}

BitString& BitString::append(const BitString& tail) {
  bits_.insert(bits_.end(), tail.bits_.begin(), tail.bits_.end());
  return *this;
}

BitString BitString::slice(std::size_t pos, std::size_t len) const {
  if (pos > bits_.size() || len > bits_.size() - pos) {
    throw Error(Errc::domain, "bit slice out of range");
  }
  BitString out;
  out.bits_.assign(bits_.begin() + static_cast<std::ptrdiff_t>(pos),
                   bits_.begin() + static_cast<std::ptrdiff_t>(pos + len));
  return out;
}

BitString BitString::left_padded(std::size_t width) const {
  if (bits_.size() >= width) return *this;
  BitString out = zeros(width - bits_.size());
  out.append(*this);
  return out;
}

std::size_t BitString::popcount() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::string BitString::str() const {
  std::string s(bits_.size(), '0');
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i]) s[i] = '1';
  }
  return s;
}

BitString operator+(BitString head, const BitString& tail) {
  head.append(tail);
  return head;
}

Radix radix_from_int(int value) {
  switch (value) {
    case 2: return Radix::binary;
    case 8: return Radix::octal;
    case 16: return Radix::hex;
    default: throw Error(Errc::config, "unsupported radix " + std::to_string(value) + " (expected 2, 8 or 16)");
  }
}

BitString to_bits(const BigInt& n, Radix radix) {
  if (n < 0) throw Error(Errc::domain, "to_bits requires a non-negative integer");
  const unsigned base = static_cast<unsigned>(radix);
  const unsigned group = radix == Radix::binary ? 1 : (radix == Radix::octal ? 3 : 4);

  // Digits least-significant first.
  std::vector<unsigned> digits;
  BigInt rest = n;
  do {
    digits.push_back(static_cast<unsigned>(rest % base));
    rest /= base;
  } while (rest != 0);

  BitString out;
  for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
    for (unsigned b = group; b-- > 0;) out.push_back(((*it >> b) & 1u) != 0);
  }
  return out;
}

BigInt from_bits(const BitString& bits) {
  if (bits.empty()) throw Error(Errc::domain, "from_bits requires a non-empty bit string");
  BigInt v = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    v <<= 1;
    if (bits[i]) v |= 1;
  }
  return v;
}

InvalidSymbolError::InvalidSymbolError(std::size_t group_index, const std::string& symbol)
    : Error(Errc::invalid_symbol,
            "invalid code symbol " + symbol + " at group " + std::to_string(group_index)),
      group_index_(group_index) {}

SubstitutionTable::SubstitutionTable(unsigned in_width, unsigned out_width,
                                     std::vector<std::string_view> symbols)
    : in_width_(in_width), out_width_(out_width) {
  if (in_width == 0 || out_width < in_width || out_width > 24) {
    throw Error(Errc::config, "substitution table widths must satisfy 0 < in <= out <= 24");
  }
  if (symbols.size() != (std::size_t{1} << in_width)) {
    throw Error(Errc::config, "substitution table needs 2^in_width symbols");
  }
  reverse_.assign(std::size_t{1} << out_width, -1);
  forward_.reserve(symbols.size());
  for (std::size_t v = 0; v < symbols.size(); ++v) {
    BitString sym = BitString::parse(symbols[v]);
    if (sym.size() != out_width) throw Error(Errc::config, "substitution symbol has wrong width");
    const auto key = static_cast<std::size_t>(from_bits(sym));
    if (reverse_[key] != -1) throw Error(Errc::config, "substitution table is not injective");
    reverse_[key] = static_cast<std::int32_t>(v);
    forward_.push_back(std::move(sym));
  }
}

const SubstitutionTable& SubstitutionTable::four_b_five_b() {
  static const SubstitutionTable table(4, 5,
                                       {"11110", "01001", "10100", "10101",   // 0000..0011
                                        "01010", "01011", "01110", "01111",   // 0100..0111
                                        "10010", "10011", "10110", "10111",   // 1000..1011
                                        "11010", "11011", "11100", "11101"});  // 1100..1111
  return table;
}

BitString SubstitutionTable::encode(const BitString& bits) const {
  const std::size_t groups = (bits.size() + in_width_ - 1) / in_width_;
  const BitString padded = bits.left_padded(groups * in_width_);
  BitString out;
  for (std::size_t g = 0; g < groups; ++g) {
    std::uint32_t value = 0;
    for (unsigned b = 0; b < in_width_; ++b) value = (value << 1) | (padded[g * in_width_ + b] ? 1u : 0u);
    out.append(forward_[value]);
  }
  return out;
}

BitString SubstitutionTable::decode(const BitString& coded) const {
  if (coded.size() % out_width_ != 0) {
    throw Error(Errc::framing, "coded length " + std::to_string(coded.size()) + " is not a multiple of " +
                                   std::to_string(out_width_));
  }
  BitString out;
  const std::size_t groups = coded.size() / out_width_;
  for (std::size_t g = 0; g < groups; ++g) {
    std::uint32_t key = 0;
    for (unsigned b = 0; b < out_width_; ++b) key = (key << 1) | (coded[g * out_width_ + b] ? 1u : 0u);
    const std::int32_t value = reverse_[key];
    if (value < 0) throw InvalidSymbolError(g, coded.slice(g * out_width_, out_width_).str());
    for (unsigned b = in_width_; b-- > 0;) out.push_back(((static_cast<std::uint32_t>(value) >> b) & 1u) != 0);
  }
  return out;
}

BitString encode_4b5b(const BitString& bits) { return SubstitutionTable::four_b_five_b().encode(bits); }

BitString decode_4b5b(const BitString& coded) { return SubstitutionTable::four_b_five_b().decode(coded); }

}  // namespace saltbio
