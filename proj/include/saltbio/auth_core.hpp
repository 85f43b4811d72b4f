#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "saltbio/audit.hpp"
#include "saltbio/bigint.hpp"
#include "saltbio/biometric.hpp"
#include "saltbio/salt_token.hpp"
#include "saltbio/tier_cipher.hpp"

namespace saltbio {

enum class AccountStatus : std::uint8_t { active, locked };

std::string_view to_string(AccountStatus s);

/// Server-side state of one enrolled user. The password is held only as its
/// ASCII-digit value, which is what the pipeline consumes.
struct EnrollmentRecord {
  std::string user_id;
  std::string home_server;
  std::vector<FeatureTemplate> references;
  BigInt password_digits;
  SaltDevice device;
  AccountStatus status = AccountStatus::active;
  std::uint32_t failed_count = 0;
  BigInt eam_password_digits;

  friend bool operator==(const EnrollmentRecord&, const EnrollmentRecord&) = default;
};

struct StoreLimits {
  std::size_t max_users = 100;
  std::size_t max_refs = 4;
};

/// Tab-separated store line: version, user_id, home_server, references as
/// "<L>:<hexbits>:<modality>" joined by ';', password digits, 16-hex-digit
/// seed, code digits, status, failed count, EAM password digits.
std::string serialize_record(const EnrollmentRecord& rec);
EnrollmentRecord parse_record(std::string_view line);

/// Owner of all enrollment records. Every mutation takes the write lock;
/// records are copied in and out, never referenced.
class TemplateStore {
 public:
  explicit TemplateStore(StoreLimits limits = {}) : limits_(limits) {}

  TemplateStore(const TemplateStore&) = delete;
  TemplateStore& operator=(const TemplateStore&) = delete;

  const StoreLimits& limits() const noexcept { return limits_; }

  /// Throws Error(conflict) for a duplicate id, Error(capacity) when the
  /// user or reference limit would be exceeded.
  void insert(EnrollmentRecord rec);
  /// Replaces an existing record. Throws Error(not_found).
  void put(EnrollmentRecord rec);
  bool erase(const std::string& user_id);

  std::optional<EnrollmentRecord> find(const std::string& user_id) const;
  bool contains(const std::string& user_id) const;
  std::size_t size() const;
  /// Snapshot ordered by user id.
  std::vector<EnrollmentRecord> records() const;

  /// Swaps in a whole new record set after checking it against the limits.
  void replace_all(std::vector<EnrollmentRecord> records);

  /// One serialize_record line per record, ordered by user id.
  std::string serialize() const;
  /// Parses serialize() output. Throws Error(format) naming the 1-based line.
  static std::vector<EnrollmentRecord> parse_lines(std::string_view text, std::size_t first_line_number = 1);

  void save(const std::filesystem::path& path) const;
  void load(const std::filesystem::path& path);

 private:
  static void check_record(const EnrollmentRecord& rec, const StoreLimits& limits);

  StoreLimits limits_;
  mutable std::shared_mutex mu_;
  std::map<std::string, EnrollmentRecord> records_;
};

/// Login decision knobs.
struct AuthPolicy {
  double tau = 0.15;
  std::uint32_t max_failures = 3;
  int skew_steps = 1;
  std::size_t feature_length = kDefaultFeatureLength;
};

struct AuthResult {
  Outcome outcome = Outcome::unknown_user;
  std::optional<double> distance;
  std::optional<std::size_t> matched_reference;
  std::optional<BigInt> template_value;
  std::uint64_t audit_seq = 0;
};

/// Template the server expects for reference `index` during the salt window
/// containing unix_time.
BigInt expected_template(const EnrollmentRecord& rec, std::size_t index, std::int64_t unix_time,
                         const PipelineConfig& cfg);

struct EnrollmentRequest {
  std::string user_id;
  std::string home_server;  // defaults to the enrolling server
  std::vector<BiometricSample> samples;
  std::string password;
  std::string eam_password;
  std::uint64_t seed = 0;
  int digits = 6;
};

/// A login at the feature level: what a referral carries across the wire.
struct VerifyRequest {
  std::string user_id;
  FeatureTemplate probe;
  /// Empty when the submitted password was not valid printable ASCII.
  std::optional<BigInt> password_digits;
  std::string salt_code;
  std::int64_t unix_time = 0;
};

/// Audit attributes of one call.
struct AuditContext {
  std::string source = "local";
  bool is_eam = false;
  std::optional<std::string> home_server;
};

/// Enrollment and the login decision procedure of one server.
///
/// Login checks run in a fixed order: user lookup, lockout, salt code,
/// biometric match (best reference wins), then a two-sided template check
/// that recomputes the pipeline output from the stored credentials and from
/// the submitted ones. Every login appends exactly one audit event.
class Authenticator {
 public:
  Authenticator(std::string server_id, TemplateStore& store, AuditLog& log, PipelineConfig cfg = {},
                AuthPolicy policy = {});

  const std::string& server_id() const noexcept { return server_id_; }
  TemplateStore& store() noexcept { return store_; }
  AuditLog& log() noexcept { return log_; }
  const PipelineConfig& config() const noexcept { return cfg_; }
  const AuthPolicy& policy() const noexcept { return policy_; }

  EnrollmentRecord enroll(const EnrollmentRequest& req, std::int64_t now, const AuditContext& ctx = {});

  AuthResult login(const std::string& user_id, const BiometricSample& sample, std::string_view password,
                   std::string_view salt_code, std::int64_t now, const AuditContext& ctx = {});

  /// Same procedure on already-extracted feature bits.
  AuthResult verify(const VerifyRequest& req, const AuditContext& ctx = {});

  /// Recomputes the cached expected template of every (record, reference)
  /// whose cache entry is from another salt step. Returns how many changed.
  std::size_t refresh_templates(std::int64_t now);
  std::optional<BigInt> cached_template(const std::string& user_id, std::size_t index) const;
  /// Drops cached templates of one user (after its references change).
  void invalidate(const std::string& user_id);
  void invalidate_all();

 private:
  AuthResult decide(const VerifyRequest& req);
  AuthResult finish(AuthResult result, const VerifyRequest& req, const AuditContext& ctx);

  std::string server_id_;
  TemplateStore& store_;
  AuditLog& log_;
  PipelineConfig cfg_;
  AuthPolicy policy_;

  std::mutex login_mu_;

  struct CacheEntry {
    std::int64_t step;
    BigInt value;
  };
  mutable std::mutex cache_mu_;
  std::map<std::pair<std::string, std::size_t>, CacheEntry> cache_;
};

}  // namespace saltbio
