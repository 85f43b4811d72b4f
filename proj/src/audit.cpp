#include "saltbio/audit.hpp"

#include <array>
#include <fstream>

#include "json.hpp"

#include "saltbio/error.hpp"
#include "saltbio/time.hpp"

namespace saltbio {

namespace {

using nlohmann::json;

constexpr std::array<std::string_view, 14> kOutcomeNames = {
    "Accept",   "RejectSalt", "RejectBiometric", "RejectTemplate", "UnknownUser", "LockedOut",      "EamOpen",
    "EamDenied", "EamUpdate", "EamReset",        "EamAddProfile", "EamFailed",   "ReferralFailed", "Enroll",
};

}  // namespace

std::string_view to_string(Outcome o) { return kOutcomeNames.at(static_cast<std::size_t>(o)); }

Outcome outcome_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kOutcomeNames.size(); ++i) {
    if (kOutcomeNames[i] == s) return static_cast<Outcome>(i);
  }
  throw Error(Errc::format, "unknown outcome: " + std::string(s));
}

bool is_login_outcome(Outcome o) { return o <= Outcome::locked_out; }

std::string serialize_event(const AuthEvent& e) {
  json j = {
      {"seq", e.seq},
      {"ts", format_rfc3339(e.ts)},
      {"server", e.server},
      {"user", e.user},
      {"outcome", to_string(e.outcome)},
      {"source", e.source},
      {"is_eam", e.is_eam},
      {"home_server", e.home_server ? json(*e.home_server) : json(nullptr)},
  };
  return j.dump();
}

AuthEvent parse_event(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& ex) {
    throw Error(Errc::format, std::string("audit line is not JSON: ") + ex.what());
  }
  static const std::array<std::string_view, 8> keys = {"seq",    "ts",     "server", "user",
                                                       "outcome", "source", "is_eam", "home_server"};
  if (!j.is_object() || j.size() != keys.size()) throw Error(Errc::format, "audit line has wrong key set");
  for (auto k : keys) {
    if (!j.contains(std::string(k))) throw Error(Errc::format, "audit line missing key " + std::string(k));
  }
  try {
    AuthEvent e;
    e.seq = j.at("seq").get<std::uint64_t>();
    e.ts = parse_time(j.at("ts").get<std::string>());
    e.server = j.at("server").get<std::string>();
    e.user = j.at("user").get<std::string>();
    e.outcome = outcome_from_string(j.at("outcome").get<std::string>());
    e.source = j.at("source").get<std::string>();
    e.is_eam = j.at("is_eam").get<bool>();
    if (!j.at("home_server").is_null()) e.home_server = j.at("home_server").get<std::string>();
    return e;
  } catch (const json::exception& ex) {
    throw Error(Errc::format, std::string("audit line has a bad field: ") + ex.what());
  }
}

std::vector<AuthEvent> read_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open audit log " + path.string());
  std::vector<AuthEvent> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(parse_event(line));
    } catch (const Error& e) {
      throw Error(Errc::format, path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

AuditLog::AuditLog(std::optional<std::filesystem::path> path) : path_(std::move(path)) {
  if (path_ && std::filesystem::exists(*path_)) events_ = read_log(*path_);
}

std::uint64_t AuditLog::append(AuthEvent event) {
  std::lock_guard lock(mu_);
  if (!events_.empty() && event.ts < events_.back().ts) {
    throw Error(Errc::parameter, "audit timestamps must be non-decreasing");
  }
  event.seq = events_.empty() ? 1 : events_.back().seq + 1;
  bool written = true;
  if (path_) {
    std::ofstream out(*path_, std::ios::app);
    out << serialize_event(event) << '\n';
    out.flush();
    written = static_cast<bool>(out);
  }
  // Kept in memory even when the file write fails; the caller still sees the error.
  events_.push_back(std::move(event));
  if (!written) throw Error(Errc::io, "cannot append to audit log " + path_->string());
  return events_.back().seq;
}

std::vector<AuthEvent> AuditLog::events() const {
  std::lock_guard lock(mu_);
  return events_;
}

std::size_t AuditLog::size() const {
  std::lock_guard lock(mu_);
  return events_.size();
}

}  // namespace saltbio
