#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

#include "saltbio/audit.hpp"

namespace saltbio {

/// End-of-day counts for one server (or a consolidation of several).
///
/// Login counts come from non-EAM events with a login outcome plus failed
/// referrals: Accept is an accept, UnknownUser an unknown attempt, everything
/// else a rejection. UnknownUser attempts are in total_logins but in neither
/// accepts nor rejects. EAM counts come from every is_eam event; the open,
/// update, reset, add-profile and enroll tags and self-check Accepts are valid,
/// everything else invalid.
struct ReportSummary {
  std::string server_id;
  std::string date;
  std::uint64_t accepts = 0;
  std::uint64_t rejects = 0;
  std::uint64_t unknown_attempts = 0;
  std::uint64_t total_logins = 0;
  std::uint64_t eam_valid = 0;
  std::uint64_t eam_invalid = 0;
  std::uint64_t eam_total = 0;
  /// (accepts - rejects) / total_logins; signed, 0 when there are no logins.
  double pct_acceptance = 0.0;
  /// (eam_valid - eam_invalid) / eam_total; signed, 0 without EAM events.
  double pct_eam = 0.0;
  /// accepts / total_logins. Conventional rate, reported alongside.
  double acceptance_rate = 0.0;

  friend bool operator==(const ReportSummary&, const ReportSummary&) = default;
};

inline constexpr std::string_view kConsolidatedServerId = "ALL";

/// Folds the events of `server_id` whose UTC date is `date`.
ReportSummary eod_report(std::span<const AuthEvent> events, const std::string& server_id, const std::string& date);

/// Sums counts and recomputes the ratios from the sums. Throws
/// Error(parameter) on mixed dates. An empty input yields an all-zero summary.
ReportSummary consolidate(std::span<const ReportSummary> reports);

/// 100 * images_enrolled / technique_capacity.
double pct_redundancy(std::uint64_t images_enrolled, std::uint64_t technique_capacity);

/// Plain-text table followed by a JSON block.
std::string render_report(std::span<const ReportSummary> per_server, const ReportSummary& consolidated);
std::string report_to_json(const ReportSummary& r);

/// Writes render_report output to `path` (the management drop location).
void write_report(const std::filesystem::path& path, std::span<const ReportSummary> per_server,
                  const ReportSummary& consolidated);

}  // namespace saltbio
