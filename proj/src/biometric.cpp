#include "saltbio/biometric.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>

#include "saltbio/error.hpp"

namespace saltbio {

std::string_view to_string(Modality m) {
  switch (m) {
    case Modality::fingerprint: return "fingerprint";
    case Modality::iris: return "iris";
    case Modality::voice: return "voice";
    case Modality::other: return "other";
  }
  return "other";
}

Modality modality_from_string(std::string_view s) {
  if (s == "fingerprint") return Modality::fingerprint;
  if (s == "iris") return Modality::iris;
  if (s == "voice") return Modality::voice;
  if (s == "other") return Modality::other;
  throw Error(Errc::format, "unknown modality: " + std::string(s));
}

FeatureTemplate feature_bits(const BiometricSample& sample, std::size_t length) {
  if (length == 0 || length % 8 != 0) {
    throw Error(Errc::parameter, "feature length must be a positive multiple of 8");
  }
  if (sample.blob.empty()) throw Error(Errc::domain, "biometric sample is empty");
  FeatureTemplate t;
  t.modality = sample.modality;
  t.bits = BitString::zeros(length);
  const std::size_t blob_bits = sample.blob.size() * 8;
  for (std::size_t i = 0; i < length; ++i) {
    const std::size_t src = i % blob_bits;
    t.bits.set(i, ((sample.blob[src / 8] >> (7 - src % 8)) & 1) != 0);
  }
  return t;
}

BitString credential_bits(const BigInt& password_digits, std::string_view salt_code) {
  return to_bits(password_digits) + to_bits(parse_decimal(salt_code));
}

BitString credential_bits(std::string_view password, std::string_view salt_code) {
  return credential_bits(ascii_digits(password), salt_code);
}

BitString fuse(const BitString& bio, const BitString& cred, Gate gate) {
  if (bio.empty() || cred.empty()) throw Error(Errc::domain, "fuse operands must be non-empty");
  const std::size_t width = std::max(bio.size(), cred.size());
  const BitString a = bio.left_padded(width);
  const BitString b = cred.left_padded(width);
  BitString out = BitString::zeros(width);
  for (std::size_t i = 0; i < width; ++i) {
    switch (gate) {
      case Gate::OR: out.set(i, a[i] || b[i]); break;
      case Gate::AND: out.set(i, a[i] && b[i]); break;
      case Gate::XOR: out.set(i, a[i] != b[i]); break;
    }
  }
  return out;
}

std::size_t hamming_distance(const BitString& a, const BitString& b) {
  if (a.size() != b.size()) throw Error(Errc::comparison, "hamming distance needs equal lengths");
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i] ? 1 : 0;
  return d;
}

MatchResult match(const FeatureTemplate& ref, const FeatureTemplate& probe, double tau) {
  if (ref.modality != probe.modality) throw Error(Errc::comparison, "template modality mismatch");
  if (ref.length() != probe.length() || ref.length() == 0) {
    throw Error(Errc::comparison, "template length mismatch");
  }
  MatchResult r;
  r.distance = static_cast<double>(hamming_distance(ref.bits, probe.bits)) / static_cast<double>(ref.length());
  r.accepted = r.distance <= tau;
  return r;
}

void write_template(std::ostream& os, const FeatureTemplate& t) {
  os << "L=" << t.length() << " modality=" << to_string(t.modality) << '\n' << t.bits.str() << '\n';
}

FeatureTemplate read_template(std::istream& is) {
  std::string header, bits;
  if (!std::getline(is, header) || !std::getline(is, bits)) {
    throw Error(Errc::format, "template file needs a header line and a bit line");
  }
  std::istringstream hs(header);
  std::string len_tok, mod_tok;
  hs >> len_tok >> mod_tok;
  if (len_tok.rfind("L=", 0) != 0 || mod_tok.rfind("modality=", 0) != 0) {
    throw Error(Errc::format, "bad template header: " + header);
  }
  FeatureTemplate t;
  const auto length = static_cast<std::size_t>(parse_decimal(len_tok.substr(2)));
  t.modality = modality_from_string(mod_tok.substr(9));
  t.bits = BitString::parse(bits);
  if (t.length() != length) throw Error(Errc::format, "template length does not match header");
  return t;
}

BiometricSample read_sample_file(const std::string& path, Modality modality) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open sample file " + path);
  BiometricSample s;
  s.modality = modality;
  s.blob.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  if (s.blob.empty()) throw Error(Errc::domain, "sample file is empty: " + path);
  return s;
}

void write_sample_file(const std::string& path, const BiometricSample& sample) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(sample.blob.data()), static_cast<std::streamsize>(sample.blob.size()));
  if (!out) throw Error(Errc::io, "cannot write sample file " + path);
}

}  // namespace saltbio
