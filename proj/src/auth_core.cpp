#include "saltbio/auth_core.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "saltbio/error.hpp"

namespace saltbio {

namespace {

constexpr std::string_view kStoreVersion = "1";

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string bits_to_hex(const BitString& bits) {
  static constexpr char kHex[] = "0123456789abcdef";
  if (bits.size() % 4 != 0) throw Error(Errc::format, "stored template length must be a multiple of 4");
  std::string out;
  for (std::size_t i = 0; i < bits.size(); i += 4) {
    unsigned v = 0;
    for (std::size_t b = 0; b < 4; ++b) v = (v << 1) | (bits[i + b] ? 1u : 0u);
    out += kHex[v];
  }
  return out;
}

BitString hex_to_bits(std::string_view hex, std::size_t length) {
  if (hex.size() * 4 != length) throw Error(Errc::format, "reference hex does not match its length");
  BitString out;
  for (char c : hex) {
    unsigned v = 0;
    if (c >= '0' && c <= '9') {
      v = static_cast<unsigned>(c - '0');
    } else if (c >= 'a' && c <= 'f') {
      v = static_cast<unsigned>(c - 'a' + 10);
    } else if (c >= 'A' && c <= 'F') {
      v = static_cast<unsigned>(c - 'A' + 10);
    } else {
      throw Error(Errc::format, "bad hex digit in reference");
    }
    for (unsigned b = 4; b-- > 0;) out.push_back(((v >> b) & 1u) != 0);
  }
  return out;
}

std::uint64_t parse_u64(std::string_view s, const char* what) {
  const BigInt v = parse_decimal(s);
  if (v > std::numeric_limits<std::uint64_t>::max()) throw Error(Errc::format, std::string(what) + " out of range");
  return static_cast<std::uint64_t>(v);
}

std::uint64_t parse_seed(std::string_view s) {
  if (s.size() != 16) throw Error(Errc::format, "device seed must be 16 hex digits");
  std::uint64_t v = 0;
  for (char c : s) {
    v <<= 4;
    if (c >= '0' && c <= '9') {
      v |= static_cast<std::uint64_t>(c - '0');
    } else if (c >= 'a' && c <= 'f') {
      v |= static_cast<std::uint64_t>(c - 'a' + 10);
    } else if (c >= 'A' && c <= 'F') {
      v |= static_cast<std::uint64_t>(c - 'A' + 10);
    } else {
      throw Error(Errc::format, "device seed must be 16 hex digits");
    }
  }
  return v;
}

BigInt fused_template(const FeatureTemplate& ref, const BigInt& password_digits, std::string_view salt_code,
                      const PipelineConfig& cfg) {
  const BitString fused = fuse(ref.bits, credential_bits(password_digits, salt_code), cfg.gate);
  return template_from_bits(fused, cfg).template_value;
}

}  // namespace

std::string_view to_string(AccountStatus s) { return s == AccountStatus::active ? "Active" : "Locked"; }

std::string serialize_record(const EnrollmentRecord& rec) {
  std::ostringstream os;
  os << kStoreVersion << '\t' << rec.user_id << '\t' << rec.home_server << '\t';
  for (std::size_t i = 0; i < rec.references.size(); ++i) {
    const auto& r = rec.references[i];
    if (i) os << ';';
    os << r.length() << ':' << bits_to_hex(r.bits) << ':' << to_string(r.modality);
  }
  char seed[17];
  std::snprintf(seed, sizeof seed, "%016llx", static_cast<unsigned long long>(rec.device.seed));
  os << '\t' << rec.password_digits << '\t' << seed << '\t' << rec.device.digits << '\t' << to_string(rec.status)
     << '\t' << rec.failed_count << '\t' << rec.eam_password_digits;
  return os.str();
}

EnrollmentRecord parse_record(std::string_view line) {
  const auto fields = split(line, '\t');
  if (fields.size() != 10) {
    throw Error(Errc::format, "store line has " + std::to_string(fields.size()) + " fields, expected 10");
  }
  if (fields[0] != kStoreVersion) throw Error(Errc::version, "unsupported store version " + std::string(fields[0]));
  EnrollmentRecord rec;
  rec.user_id = std::string(fields[1]);
  rec.home_server = std::string(fields[2]);
  if (rec.user_id.empty()) throw Error(Errc::format, "empty user id");
  for (auto ref : split(fields[3], ';')) {
    const auto parts = split(ref, ':');
    if (parts.size() != 3) throw Error(Errc::format, "reference must be <L>:<hexbits>:<modality>");
    FeatureTemplate t;
    t.bits = hex_to_bits(parts[1], parse_u64(parts[0], "reference length"));
    t.modality = modality_from_string(parts[2]);
    rec.references.push_back(std::move(t));
  }
  rec.password_digits = parse_decimal(fields[4]);
  const auto digits = parse_u64(fields[6], "code digits");
  rec.device = SaltDevice::make(parse_seed(fields[5]), static_cast<int>(std::min<std::uint64_t>(digits, 99)));
  if (fields[7] == "Active") {
    rec.status = AccountStatus::active;
  } else if (fields[7] == "Locked") {
    rec.status = AccountStatus::locked;
  } else {
    throw Error(Errc::format, "bad account status " + std::string(fields[7]));
  }
  rec.failed_count = static_cast<std::uint32_t>(parse_u64(fields[8], "failed count"));
  rec.eam_password_digits = parse_decimal(fields[9]);
  return rec;
}

void TemplateStore::check_record(const EnrollmentRecord& rec, const StoreLimits& limits) {
  if (rec.references.empty()) throw Error(Errc::parameter, "a record needs at least one reference");
  if (rec.references.size() > limits.max_refs) {
    throw Error(Errc::capacity, "record for " + rec.user_id + " has " + std::to_string(rec.references.size()) +
                                    " references, limit is " + std::to_string(limits.max_refs));
  }
}

void TemplateStore::insert(EnrollmentRecord rec) {
  check_record(rec, limits_);
  std::unique_lock lock(mu_);
  if (records_.contains(rec.user_id)) throw Error(Errc::conflict, "user already enrolled: " + rec.user_id);
  if (records_.size() >= limits_.max_users) throw Error(Errc::capacity, "template store is full");
  auto id = rec.user_id;
  records_.emplace(std::move(id), std::move(rec));
}

void TemplateStore::put(EnrollmentRecord rec) {
  check_record(rec, limits_);
  std::unique_lock lock(mu_);
  auto it = records_.find(rec.user_id);
  if (it == records_.end()) throw Error(Errc::not_found, "no such user: " + rec.user_id);
  it->second = std::move(rec);
}

bool TemplateStore::erase(const std::string& user_id) {
  std::unique_lock lock(mu_);
  return records_.erase(user_id) > 0;
}

std::optional<EnrollmentRecord> TemplateStore::find(const std::string& user_id) const {
  std::shared_lock lock(mu_);
  auto it = records_.find(user_id);
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

bool TemplateStore::contains(const std::string& user_id) const {
  std::shared_lock lock(mu_);
  return records_.contains(user_id);
}

std::size_t TemplateStore::size() const {
  std::shared_lock lock(mu_);
  return records_.size();
}

std::vector<EnrollmentRecord> TemplateStore::records() const {
  std::shared_lock lock(mu_);
  std::vector<EnrollmentRecord> out;
  out.reserve(records_.size());
  for (const auto& [id, rec] : records_) out.push_back(rec);
  return out;
}

void TemplateStore::replace_all(std::vector<EnrollmentRecord> records) {
  std::map<std::string, EnrollmentRecord> next;
  for (auto& rec : records) {
    check_record(rec, limits_);
    auto id = rec.user_id;
    if (!next.emplace(std::move(id), std::move(rec)).second) throw Error(Errc::conflict, "duplicate user in set");
  }
  if (next.size() > limits_.max_users) throw Error(Errc::capacity, "record set exceeds the user limit");
  std::unique_lock lock(mu_);
  records_ = std::move(next);
}

std::string TemplateStore::serialize() const {
  std::shared_lock lock(mu_);
  std::string out;
  for (const auto& [id, rec] : records_) {
    out += serialize_record(rec);
    out += '\n';
  }
  return out;
}

std::vector<EnrollmentRecord> TemplateStore::parse_lines(std::string_view text, std::size_t first_line_number) {
  std::vector<EnrollmentRecord> out;
  std::size_t lineno = first_line_number;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const auto line = text.substr(start, end - start);
    if (!line.empty()) {
      try {
        out.push_back(parse_record(line));
      } catch (const Error& e) {
        throw Error(e.code(), "line " + std::to_string(lineno) + ": " + e.what());
      }
    }
    start = end + 1;
    ++lineno;
  }
  return out;
}

void TemplateStore::save(const std::filesystem::path& path) const {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
    out << serialize();
    out.flush();
    if (!out) throw Error(Errc::io, "cannot write store " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(Errc::io, "cannot replace store " + path.string() + ": " + ec.message());
}

void TemplateStore::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open store " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  replace_all(parse_lines(buf.str()));
}

BigInt expected_template(const EnrollmentRecord& rec, std::size_t index, std::int64_t unix_time,
                         const PipelineConfig& cfg) {
  if (index >= rec.references.size()) throw Error(Errc::parameter, "reference index out of range");
  return fused_template(rec.references[index], rec.password_digits, code_at(rec.device, unix_time), cfg);
}

Authenticator::Authenticator(std::string server_id, TemplateStore& store, AuditLog& log, PipelineConfig cfg,
                             AuthPolicy policy)
    : server_id_(std::move(server_id)), store_(store), log_(log), cfg_(std::move(cfg)), policy_(policy) {
  if (policy_.max_failures == 0) throw Error(Errc::parameter, "max_failures must be positive");
  if (policy_.tau < 0.0 || policy_.tau > 1.0) throw Error(Errc::parameter, "tau must be in [0, 1]");
}

EnrollmentRecord Authenticator::enroll(const EnrollmentRequest& req, std::int64_t now, const AuditContext& ctx) {
  if (req.user_id.empty()) throw Error(Errc::parameter, "user id must not be empty");
  if (req.samples.empty()) throw Error(Errc::parameter, "enrollment needs at least one sample");
  if (req.samples.size() > store_.limits().max_refs) {
    throw Error(Errc::capacity, "at most " + std::to_string(store_.limits().max_refs) + " samples per user");
  }
  EnrollmentRecord rec;
  rec.user_id = req.user_id;
  rec.home_server = req.home_server.empty() ? server_id_ : req.home_server;
  for (const auto& s : req.samples) rec.references.push_back(feature_bits(s, policy_.feature_length));
  rec.password_digits = ascii_digits(req.password);
  rec.eam_password_digits = ascii_digits(req.eam_password);
  rec.device = SaltDevice::make(req.seed, req.digits);
  store_.insert(rec);
  invalidate(rec.user_id);
  log_.append(AuthEvent{0, now, server_id_, rec.user_id, Outcome::enroll, ctx.source, ctx.is_eam, ctx.home_server});
  return rec;
}

AuthResult Authenticator::login(const std::string& user_id, const BiometricSample& sample,
                                std::string_view password, std::string_view salt_code, std::int64_t now,
                                const AuditContext& ctx) {
  VerifyRequest req;
  req.user_id = user_id;
  req.salt_code = std::string(salt_code);
  req.unix_time = now;
  try {
    req.password_digits = ascii_digits(password);
  } catch (const Error&) {
    // Left empty: fails the template check.
  }
  req.probe = feature_bits(sample, policy_.feature_length);
  return verify(req, ctx);
}

AuthResult Authenticator::verify(const VerifyRequest& req, const AuditContext& ctx) {
  std::lock_guard lock(login_mu_);
  return finish(decide(req), req, ctx);
}

AuthResult Authenticator::decide(const VerifyRequest& req) {
  AuthResult res;
  auto rec = store_.find(req.user_id);
  if (!rec) {
    res.outcome = Outcome::unknown_user;
    return res;
  }
  if (rec->status == AccountStatus::locked) {
    res.outcome = Outcome::locked_out;
    return res;
  }

  SaltValidation salt;
  try {
    salt = validate(rec->device, req.salt_code, req.unix_time, policy_.skew_steps);
  } catch (const Error&) {
    salt.accepted = false;
  }
  if (!salt.accepted) {
    res.outcome = Outcome::reject_salt;
    return res;
  }

  auto record_failure = [&] {
    rec->failed_count = std::min(rec->failed_count + 1, policy_.max_failures);
    if (rec->failed_count >= policy_.max_failures) rec->status = AccountStatus::locked;
    store_.put(*rec);
  };

  std::optional<std::size_t> best;
  double best_distance = 2.0;
  for (std::size_t i = 0; i < rec->references.size(); ++i) {
    const auto& ref = rec->references[i];
    if (ref.modality != req.probe.modality || ref.length() != req.probe.length()) continue;
    const double d = match(ref, req.probe, policy_.tau).distance;
    if (d < best_distance) {
      best_distance = d;
      best = i;
    }
  }
  if (best) res.distance = best_distance;
  if (!best || best_distance > policy_.tau) {
    res.outcome = Outcome::reject_biometric;
    record_failure();
    return res;
  }
  res.matched_reference = best;

  // Both sides use the matched stored reference and the validated step's code;
  // they differ only in whose password digits feed the credential bits.
  const auto& ref = rec->references[*best];
  const std::int64_t step = rec->device.step_of(req.unix_time) + *salt.offset;
  const std::string window_code = code_for_step(rec->device, step);
  const BigInt stored = fused_template(ref, rec->password_digits, window_code, cfg_);
  const bool same = req.password_digits &&
                    fused_template(ref, *req.password_digits, req.salt_code, cfg_) == stored;
  if (!same) {
    res.outcome = Outcome::reject_template;
    record_failure();
    return res;
  }
  res.outcome = Outcome::accept;
  res.template_value = stored;
  if (rec->failed_count != 0) {
    rec->failed_count = 0;
    store_.put(*rec);
  }
  return res;
}

AuthResult Authenticator::finish(AuthResult result, const VerifyRequest& req, const AuditContext& ctx) {
  result.audit_seq = log_.append(
      AuthEvent{0, req.unix_time, server_id_, req.user_id, result.outcome, ctx.source, ctx.is_eam, ctx.home_server});
  return result;
}

std::size_t Authenticator::refresh_templates(std::int64_t now) {
  const auto records = store_.records();
  std::lock_guard lock(cache_mu_);
  std::size_t refreshed = 0;
  for (const auto& rec : records) {
    const std::int64_t step = rec.device.step_of(now);
    for (std::size_t i = 0; i < rec.references.size(); ++i) {
      auto [it, inserted] = cache_.try_emplace({rec.user_id, i}, CacheEntry{step, 0});
      if (!inserted && it->second.step == step) continue;
      it->second = CacheEntry{step, expected_template(rec, i, now, cfg_)};
      ++refreshed;
    }
  }
  return refreshed;
}

std::optional<BigInt> Authenticator::cached_template(const std::string& user_id, std::size_t index) const {
  std::lock_guard lock(cache_mu_);
  auto it = cache_.find({user_id, index});
  if (it == cache_.end()) return std::nullopt;
  return it->second.value;
}

void Authenticator::invalidate(const std::string& user_id) {
  std::lock_guard lock(cache_mu_);
  for (auto it = cache_.lower_bound({user_id, 0}); it != cache_.end() && it->first.first == user_id;) {
    it = cache_.erase(it);
  }
}

void Authenticator::invalidate_all() {
  std::lock_guard lock(cache_mu_);
  cache_.clear();
}

}  // namespace saltbio
