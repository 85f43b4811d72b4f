#include <random>
#include <set>

#include "doctest.h"
#include "oracle.hpp"
#include "fixtures.hpp"
#include "saltbio/bitcodec.hpp"

using namespace saltbio;

namespace {

BitString bits(std::string_view s) { return BitString::parse(s); }

mpz_class to_mpz(const BigInt& v) { return mpz_class(v.str(), 10); }

}  // namespace

TEST_CASE("to_bits gives the minimal binary expansion") {
  CHECK(to_bits(5).str() == "101");
  CHECK(to_bits(0).str() == "0");
  CHECK(to_bits(1).str() == "1");
  CHECK(to_bits(BigInt("9886884043440")).str() == "10001111110111111000001101100001101010110000");
  CHECK(to_bits(BigInt("9886884043440")).size() == 44);
}

TEST_CASE("from_bits reads base 2 and keeps leading zeros insignificant") {
  CHECK(from_bits(bits("0001")) == 1);
  CHECK(from_bits(bits("101")) == 5);
  CHECK(from_bits(bits("0")) == 0);
  CHECK_THROWS_AS(from_bits(BitString{}), Error);
  try {
    from_bits(BitString{});
  } catch (const Error& e) {
    CHECK(e.code() == Errc::domain);
  }
}

TEST_CASE("binary conversion round-trips exhaustively below 2^16") {
  for (unsigned n = 0; n <= (1u << 16); ++n) {
    const BitString b = to_bits(n);
    REQUIRE(from_bits(b) == n);
    REQUIRE(b.str() == oracle::binary(mpz_class(n)));
  }
}

TEST_CASE("binary conversion agrees with the GMP reference on random values") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    BigInt v = rng() & 0xFFFFFFFFu;
    if (i % 2 == 0) v = (v << 64) | BigInt(rng());
    const BitString b = to_bits(v);
    CHECK(b.str() == oracle::binary(to_mpz(v)));
    CHECK(from_bits(b) == v);
  }
}

TEST_CASE("octal and hex use fixed digit groups") {
  CHECK(to_bits(8, Radix::octal).str() == "001000");
  CHECK(to_bits(0x1F, Radix::hex).str() == "00011111");
  CHECK(to_bits(0, Radix::hex).str() == "0000");
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    const BigInt v = rng();
    CHECK(to_bits(v, Radix::octal).str() == oracle::radix_bits(to_mpz(v), 8));
    CHECK(to_bits(v, Radix::hex).str() == oracle::radix_bits(to_mpz(v), 16));
    CHECK(from_bits(to_bits(v, Radix::octal)) == v);
    CHECK(from_bits(to_bits(v, Radix::hex)) == v);
  }
}

TEST_CASE("unsupported radix is a configuration error") {
  CHECK(radix_from_int(2) == Radix::binary);
  CHECK(radix_from_int(16) == Radix::hex);
  try {
    radix_from_int(10);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::config);
  }
}

TEST_CASE("BitString parse rejects other characters") {
  CHECK_THROWS_AS(BitString::parse("0120"), Error);
  CHECK(BitString::parse("").empty());
  CHECK(bits("01") != bits("1"));
}

TEST_CASE("4B/5B forward table matches every row") {
  const std::vector<std::pair<std::string, std::string>> rows = {
      {"0000", "11110"}, {"0001", "01001"}, {"0010", "10100"}, {"0011", "10101"},
      {"0100", "01010"}, {"0101", "01011"}, {"0110", "01110"}, {"0111", "01111"},
      {"1000", "10010"}, {"1001", "10011"}, {"1010", "10110"}, {"1011", "10111"},
      {"1100", "11010"}, {"1101", "11011"}, {"1110", "11100"}, {"1111", "11101"},
  };
  for (const auto& [in, out] : rows) {
    CAPTURE(in);
    CHECK(encode_4b5b(bits(in)).str() == out);
    CHECK(decode_4b5b(bits(out)).str() == in);
  }
}

TEST_CASE("encode left-pads to a whole nibble") {
  CHECK(encode_4b5b(bits("110")).str() == "01110");
  CHECK(encode_4b5b(BitString{}).empty());
  CHECK(encode_4b5b(bits("10001111110111111000001101100001101010110000")).str() ==
        "1001011101110111110110010101010111001001101101011111110");
}

TEST_CASE("decode rejects symbols outside the table and bad framing") {
  try {
    decode_4b5b(bits("11111"));
    FAIL("expected throw");
  } catch (const InvalidSymbolError& e) {
    CHECK(e.code() == Errc::invalid_symbol);
    CHECK(e.group_index() == 0);
  }
  try {
    decode_4b5b(bits("111101111000000"));
    FAIL("expected throw");
  } catch (const InvalidSymbolError& e) {
    CHECK(e.group_index() == 2);
  }
  try {
    decode_4b5b(bits("1111011"));
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::framing);
  }
}

TEST_CASE("encoding is injective over all 8-bit inputs") {
  std::set<std::string> seen;
  for (unsigned v = 0; v < 256; ++v) {
    const BitString in = to_bits(v).left_padded(8);
    const BitString out = encode_4b5b(in);
    CHECK(out.size() == 10);
    CHECK(out.str() == oracle::encode_4b5b(in.str()));
    seen.insert(out.str());
  }
  CHECK(seen.size() == 256);
}

TEST_CASE("no symbol has more than one leading or two trailing zeros") {
  const auto& table = SubstitutionTable::four_b_five_b();
  for (std::uint32_t v = 0; v < 16; ++v) {
    const std::string s = table.forward(v).str();
    CAPTURE(s);
    CHECK(s.find_first_not_of('0') <= 1);
    CHECK(s.size() - 1 - s.find_last_not_of('0') <= 2);
  }
}

TEST_CASE("decode inverts encode up to left padding") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 3000; ++i) {
    const std::size_t n = 1 + rng() % 64;
    const BitString in = fixtures::random_bits(rng, n);
    const BitString coded = encode_4b5b(in);
    CHECK(coded.size() == 5 * ((n + 3) / 4));
    const BitString back = decode_4b5b(coded);
    CHECK(back == in.left_padded(back.size()));
    CHECK(back.size() - n < 4);
  }
}

TEST_CASE("tables are pluggable and must be injective") {
  const SubstitutionTable manchester(1, 2, {"01", "10"});
  CHECK(manchester.encode(bits("101")).str() == "100110");
  CHECK(manchester.decode(bits("100110")).str() == "101");
  CHECK_THROWS_AS(manchester.decode(bits("11")), InvalidSymbolError);
  CHECK_THROWS_AS(SubstitutionTable(1, 2, {"01", "01"}), Error);
  CHECK_THROWS_AS(SubstitutionTable(1, 2, {"01"}), Error);
  CHECK_THROWS_AS(SubstitutionTable(1, 2, {"01", "100"}), Error);
}
