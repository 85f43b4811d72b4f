#pragma once

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace saltbio {

/// Closed set of audited outcomes: the six login results plus EAM, referral
/// and enrollment tags.
enum class Outcome : std::uint8_t {
  accept,
  reject_salt,
  reject_biometric,
  reject_template,
  unknown_user,
  locked_out,
  eam_open,
  eam_denied,
  eam_update,
  eam_reset,
  eam_add_profile,
  eam_failed,
  referral_failed,
  enroll,
};

std::string_view to_string(Outcome o);
Outcome outcome_from_string(std::string_view s);

/// True for the six login outcomes.
bool is_login_outcome(Outcome o);

struct AuthEvent {
  std::uint64_t seq = 0;
  std::int64_t ts = 0;
  std::string server;
  std::string user;
  Outcome outcome = Outcome::accept;
  std::string source;
  bool is_eam = false;
  std::optional<std::string> home_server;

  friend bool operator==(const AuthEvent&, const AuthEvent&) = default;
};

/// One JSON object, keys {seq, ts, server, user, outcome, source, is_eam,
/// home_server}; ts as RFC 3339 UTC; home_server null when absent.
std::string serialize_event(const AuthEvent& e);
AuthEvent parse_event(std::string_view line);

/// Parses every line of a log file. Throws Error(format) naming the line.
std::vector<AuthEvent> read_log(const std::filesystem::path& path);

/// Append-only event log. With a path, every append is written and flushed
/// before it returns; existing entries are replayed on construction.
class AuditLog {
 public:
  AuditLog() = default;
  /// nullopt gives a memory-only log.
  explicit AuditLog(std::optional<std::filesystem::path> path);

  AuditLog(const AuditLog&) = delete;
  AuditLog& operator=(const AuditLog&) = delete;

  /// Assigns the next sequence number and returns it. Throws Error(parameter)
  /// if ts precedes the last entry, Error(io) if the write fails.
  std::uint64_t append(AuthEvent event);

  std::vector<AuthEvent> events() const;
  std::size_t size() const;
  const std::optional<std::filesystem::path>& path() const noexcept { return path_; }

 private:
  mutable std::mutex mu_;
  std::optional<std::filesystem::path> path_;
  std::vector<AuthEvent> events_;
};

}  // namespace saltbio
