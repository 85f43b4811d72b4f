#include <map>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracle.hpp"
#include "saltbio/tier_cipher.hpp"

using namespace saltbio;

namespace {

mpz_class to_mpz(const BigInt& v) { return mpz_class(v.str(), 10); }

PipelineConfig hello_config() {
  PipelineConfig cfg;
  cfg.scale_override = BigInt(40);
  return cfg;
}

std::vector<unsigned> sieve(unsigned limit) {
  std::vector<bool> composite(limit + 1);
  std::vector<unsigned> primes;
  for (unsigned i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    primes.push_back(i);
    for (unsigned j = i * i; j <= limit; j += i) composite[j] = true;
  }
  return primes;
}

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return Errc::io;
}

}  // namespace

TEST_CASE("keygen on the textbook primes") {
  const RsaParams k = keygen(11, 13, 7);
  CHECK(k.n == 143);
  CHECK(k.m == 120);
  CHECK(k.e == 103);
  CHECK((k.d * k.e) % k.m == 1);
  CHECK(k.below_recommended_size());
}

TEST_CASE("keygen rejects d without an inverse") {
  try {
    keygen(11, 13, 3);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::no_inverse);
    CHECK(std::string(e.what()).find("gcd = 3") != std::string::npos);
  }
}

TEST_CASE("keygen parameter checks") {
  CHECK(code_of([] { keygen(12, 13, 7); }) == Errc::parameter);
  CHECK(code_of([] { keygen(11, 15, 7); }) == Errc::parameter);
  CHECK(code_of([] { keygen(11, 11, 7); }) == Errc::parameter);
  CHECK(code_of([] { keygen(11, 13, 1); }) == Errc::parameter);
  CHECK(code_of([] { keygen(11, 13, 120); }) == Errc::parameter);
}

TEST_CASE("is_prime agrees with a sieve") {
  const auto primes = sieve(20000);
  std::vector<bool> is_p(20001);
  for (unsigned p : primes) is_p[p] = true;
  for (unsigned n = 0; n <= 20000; ++n) REQUIRE(is_prime(n) == is_p[n]);
  CHECK(is_prime(BigInt("2305843009213693951")));   // 2^61 - 1
  CHECK_FALSE(is_prime(BigInt("3215031751")));      // strong pseudoprime to 2, 3, 5, 7
}

TEST_CASE("keygen property over random small-prime triples") {
  const auto primes = sieve(2000);
  std::mt19937_64 rng(42);
  int built = 0;
  int refused = 0;
  for (int i = 0; i < 1000; ++i) {
    const unsigned p = primes[rng() % primes.size()];
    unsigned q = primes[rng() % primes.size()];
    if (q == p) q = primes[(std::find(primes.begin(), primes.end(), p) - primes.begin() + 1) % primes.size()];
    const BigInt m = BigInt(p - 1) * (q - 1);
    if (m <= 3) continue;
    const BigInt d = 2 + BigInt(rng() % static_cast<std::uint64_t>(m - 3));
    mpz_class g;
    mpz_class dd = to_mpz(d), mm = to_mpz(m);
    mpz_gcd(g.get_mpz_t(), dd.get_mpz_t(), mm.get_mpz_t());
    if (g == 1) {
      const RsaParams k = keygen(p, q, d);
      CHECK(k.n == BigInt(p) * q);
      CHECK((k.d * k.e) % k.m == 1);
      CHECK(k.e > 0);
      CHECK(k.e < k.m);
      ++built;
    } else {
      CHECK(code_of([&] { keygen(p, q, d); }) == Errc::no_inverse);
      ++refused;
    }
  }
  CHECK(built > 0);
  CHECK(refused > 0);
}

TEST_CASE("mod_inverse matches brute force") {
  for (int m = 2; m < 80; ++m) {
    for (int a = 0; a < m; ++a) {
      int brute = -1;
      for (int x = 0; x < m; ++x) {
        if ((a * x) % m == 1) {
          brute = x;
          break;
        }
      }
      const auto inv = mod_inverse(a, m);
      if (brute < 0) {
        CHECK_FALSE(inv.has_value());
      } else {
        REQUIRE(inv.has_value());
        CHECK(*inv == brute);
      }
    }
  }
}

TEST_CASE("ascii_digits") {
  CHECK(ascii_digits("HELLO") == BigInt("7269767679"));
  CHECK(ascii_digits("A") == 65);
  CHECK(ascii_digits("Hello") == BigInt("72101108108111"));
  CHECK(code_of([] { ascii_digits(""); }) == Errc::domain);
  CHECK(code_of([] { ascii_digits("caf\xc3\xa9"); }) == Errc::domain);
  CHECK(code_of([] { ascii_digits("tab\there"); }) == Errc::domain);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    std::string pw;
    for (std::size_t n = 1 + rng() % 20; n > 0; --n) pw += static_cast<char>(32 + rng() % 95);
    CHECK(to_mpz(ascii_digits(pw)) == oracle::ascii_digits(pw));
  }
}

TEST_CASE("salt combination and scaling") {
  CHECK(salt_combine(BigInt("7269767679"), 34, SaltCombine::multiply) == BigInt("247172101086"));
  CHECK(salt_combine(BigInt("7269767679"), 34, SaltCombine::concat_digits) == BigInt("726976767934"));
  CHECK(scale_by_e(BigInt("247172101086"), 40) == BigInt("9886884043440"));
  CHECK(scale_by_e(BigInt("247172101086"), 47) == BigInt("11617088751042"));
  CHECK(code_of([] { scale_by_e(5, 0); }) == Errc::parameter);
  CHECK(salt_combine_from_string("concat_digits") == SaltCombine::concat_digits);
  CHECK(gate_from_string("XOR") == Gate::XOR);
  CHECK(code_of([] { gate_from_string("NAND"); }) == Errc::config);
}

TEST_CASE("round half away from zero") {
  CHECK(round_half_away(Rational(5, 2)) == 3);
  CHECK(round_half_away(Rational(-5, 2)) == -3);
  CHECK(round_half_away(Rational(7, 3)) == 2);
  CHECK(round_half_away(Rational(-7, 3)) == -2);
  CHECK(round_half_away(Rational(-8, 3)) == -3);
  CHECK(round_half_away(Rational(0)) == 0);
}

TEST_CASE("sine tail examples") {
  auto r = sine_tail(0, 3);
  CHECK(r.sum == 0);
  CHECK(r.template_value == 0);
  r = sine_tail(1, 0);
  CHECK(r.sum == 1);
  CHECK(r.template_value == 1);
  r = sine_tail(30, 3);
  CHECK(to_string(r.sum) == "-28988790/7");
  CHECK(r.template_value == 4141256);
  r = sine_tail(BigInt("10205099"), 3);
  CHECK(to_string(r.sum) == "-11527113124319957884045838595621726389301909306941/5040");
  CHECK(r.template_value == BigInt("2287125619904753548421793372147167934385299466"));
  CHECK(code_of([] { sine_tail(-1, 3); }) == Errc::domain);
}

TEST_CASE("sine tail agrees with the GMP reference") {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 300; ++i) {
    const BigInt x = BigInt(rng()) >> (rng() % 64);
    const unsigned k = static_cast<unsigned>(rng() % 7);
    const auto r = sine_tail(x, k);
    const mpq_class ref = oracle::sine_sum(to_mpz(x), k);
    CHECK(to_string(r.sum) == oracle::to_str(ref));
    CHECK(to_mpz(r.template_value) == oracle::abs_rounded(ref));
  }
}

TEST_CASE("HELLO trace matches the reference values") {
  const StageTrace t = encrypt_password("HELLO", 34, hello_config());
  CHECK(t.ascii_value == BigInt("7269767679"));
  CHECK(t.combined_value == BigInt("247172101086"));
  CHECK(t.scaled_value == BigInt("9886884043440"));
  CHECK(t.pre_code_bits.str() == "10001111110111111000001101100001101010110000");
  CHECK(t.coded_bits.str() == "1001011101110111110110010101010111001001101101011111110");
  CHECK(t.recoded_value == BigInt("21317248407100158"));
  CHECK(to_string(t.series_sum) ==
        "-1389170428820804950758285398239262959083471612564250112361892652271012448608895238119465066545149081136"
        "7196275374/35");
  CHECK(t.template_value ==
        BigInt("396905836805944271645224399496932274023849032161214317817683614934574985316827210891275733298614023181"
               "919893582"));
  CHECK(trace_consistent(t, "HELLO", 34, hello_config()));
}

TEST_CASE("trace consistency detects tampering") {
  const auto cfg = hello_config();
  StageTrace t = encrypt_password("HELLO", 34, cfg);
  CHECK_FALSE(trace_consistent(t, "HELLO", 35, cfg));
  CHECK_FALSE(trace_consistent(t, "HELLp", 34, cfg));
  StageTrace bad = t;
  bad.recoded_value += 1;
  CHECK_FALSE(trace_consistent(bad, "HELLO", 34, cfg));
  bad = t;
  bad.pre_code_bits = BitString::parse("0") + t.pre_code_bits;
  CHECK_FALSE(trace_consistent(bad, "HELLO", 34, cfg));
}

TEST_CASE("pipeline agrees with the GMP reference across configurations") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 200; ++i) {
    std::string pw;
    for (std::size_t n = 1 + rng() % 12; n > 0; --n) pw += static_cast<char>(32 + rng() % 95);
    const std::uint64_t salt = rng() % 1000000;
    PipelineConfig cfg;
    const int radix = std::array{2, 8, 16}[rng() % 3];
    cfg.radix = radix_from_int(radix);
    cfg.series_terms = static_cast<unsigned>(rng() % 5);
    cfg.salt_combine = (rng() & 1) ? SaltCombine::concat_digits : SaltCombine::multiply;
    const StageTrace t = encrypt_password(pw, salt, cfg);
    const auto ref = oracle::pipeline(pw, mpz_class(std::to_string(salt)), mpz_class(103), radix, cfg.series_terms,
                                      cfg.salt_combine == SaltCombine::concat_digits);
    CAPTURE(pw);
    CHECK(to_mpz(t.scaled_value) == ref.scaled);
    CHECK(t.pre_code_bits.str() == ref.pre_bits);
    CHECK(t.coded_bits.str() == ref.coded_bits);
    CHECK(to_mpz(t.recoded_value) == ref.recoded);
    CHECK(to_string(t.series_sum) == oracle::to_str(ref.sum));
    CHECK(to_mpz(t.template_value) == ref.template_value);
    CHECK(trace_consistent(t, pw, salt, cfg));
  }
}

TEST_CASE("pipeline is deterministic") {
  const auto cfg = hello_config();
  CHECK(encrypt_password("HELLO", 34, cfg) == encrypt_password("HELLO", 34, cfg));
}

TEST_CASE("distinct salts give distinct templates") {
  const auto cfg = hello_config();
  std::map<BigInt, int> seen;
  std::vector<std::pair<int, int>> collisions;
  for (int s = 1; s <= 1000; ++s) {
    const auto [it, fresh] = seen.emplace(encrypt_password("HELLO", s, cfg).template_value, s);
    if (!fresh) collisions.emplace_back(it->second, s);
  }
  for (const auto& [a, b] : collisions) MESSAGE("template collision between salts " << a << " and " << b);
  CHECK(collisions.empty());
}

TEST_CASE("fused-bits entry point") {
  PipelineConfig cfg;
  FusedTemplate f = template_from_bits(BitString::parse("0000"), cfg);
  CHECK(f.recoded_value == 30);
  CHECK(f.template_value == 4141256);
  f = template_from_bits(BitString::parse("0111010101010111110010101"), cfg);
  CHECK(f.recoded_value == BigInt("33175598699"));
  CHECK(f.template_value == BigInt("8776085524536827988837394127425874824204153073014125212018321720413741"));
  CHECK(to_mpz(f.template_value) == oracle::fused_template("0111010101010111110010101", 3));
  CHECK(code_of([&] { template_from_bits(BitString{}, cfg); }) == Errc::domain);
}

TEST_CASE("format_trace labels every stage") {
  const std::string text = format_trace(encrypt_password("HELLO", 34, hello_config()));
  for (const char* label : {"ascii_value: 7269767679\n", "combined_value: 247172101086\n",
                            "scaled_value: 9886884043440\n", "recoded_value: 21317248407100158\n", "series_sum: -",
                            "template: 3969058368"}) {
    CHECK(text.find(label) != std::string::npos);
  }
}
