#include "saltbio/report.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "saltbio/error.hpp"
#include "saltbio/time.hpp"

namespace saltbio {

namespace {

bool eam_valid_outcome(Outcome o) {
  switch (o) {
    case Outcome::eam_open:
    case Outcome::eam_update:
    case Outcome::eam_reset:
    case Outcome::eam_add_profile:
    case Outcome::enroll:
    case Outcome::accept:
      return true;
    default:
      return false;
  }
}

double signed_ratio(std::uint64_t plus, std::uint64_t minus, std::uint64_t total) {
  if (total == 0) return 0.0;
  return (static_cast<double>(plus) - static_cast<double>(minus)) / static_cast<double>(total);
}

void finish(ReportSummary& r) {
  r.total_logins = r.accepts + r.rejects + r.unknown_attempts;
  r.eam_total = r.eam_valid + r.eam_invalid;
  r.pct_acceptance = signed_ratio(r.accepts, r.rejects, r.total_logins);
  r.pct_eam = signed_ratio(r.eam_valid, r.eam_invalid, r.eam_total);
  r.acceptance_rate = r.total_logins == 0 ? 0.0 : static_cast<double>(r.accepts) / static_cast<double>(r.total_logins);
}

}  // namespace

ReportSummary eod_report(std::span<const AuthEvent> events, const std::string& server_id, const std::string& date) {
  ReportSummary r;
  r.server_id = server_id;
  r.date = date;
  for (const auto& e : events) {
    if (e.server != server_id || utc_date(e.ts) != date) continue;
    if (e.is_eam) {
      (eam_valid_outcome(e.outcome) ? r.eam_valid : r.eam_invalid) += 1;
    } else if (e.outcome == Outcome::accept) {
      ++r.accepts;
    } else if (e.outcome == Outcome::unknown_user) {
      ++r.unknown_attempts;
    } else if (is_login_outcome(e.outcome) || e.outcome == Outcome::referral_failed) {
      ++r.rejects;
    }
  }
  finish(r);
  return r;
}

ReportSummary consolidate(std::span<const ReportSummary> reports) {
  ReportSummary out;
  out.server_id = std::string(kConsolidatedServerId);
  if (reports.empty()) return out;
  out.date = reports.front().date;
  for (const auto& r : reports) {
    if (r.date != out.date) throw Error(Errc::parameter, "cannot consolidate reports of different dates");
    out.accepts += r.accepts;
    out.rejects += r.rejects;
    out.unknown_attempts += r.unknown_attempts;
    out.eam_valid += r.eam_valid;
    out.eam_invalid += r.eam_invalid;
  }
  finish(out);
  return out;
}

double pct_redundancy(std::uint64_t images_enrolled, std::uint64_t technique_capacity) {
  if (technique_capacity == 0) throw Error(Errc::parameter, "technique capacity must be positive");
  if (images_enrolled > technique_capacity) {
    throw Error(Errc::parameter, "enrolled images exceed technique capacity");
  }
  return 100.0 * static_cast<double>(images_enrolled) / static_cast<double>(technique_capacity);
}

std::string report_to_json(const ReportSummary& r) {
  nlohmann::ordered_json j = {
      {"server", r.server_id},
      {"date", r.date},
      {"accepts", r.accepts},
      {"rejects", r.rejects},
      {"unknown_attempts", r.unknown_attempts},
      {"total_logins", r.total_logins},
      {"eam_valid", r.eam_valid},
      {"eam_invalid", r.eam_invalid},
      {"eam_total", r.eam_total},
      {"pct_acceptance", r.pct_acceptance},
      {"pct_eam", r.pct_eam},
      {"acceptance_rate", r.acceptance_rate},
  };
  return j.dump();
}

std::string render_report(std::span<const ReportSummary> per_server, const ReportSummary& consolidated) {
  std::ostringstream os;
  os << "# EOD authentication report " << consolidated.date << '\n'
     << "# pct_acceptance = (accepts - rejects) / total_logins (signed); "
        "acceptance_rate = accepts / total_logins\n"
     << "# UnknownUser attempts count toward total_logins only\n";
  os << std::left << std::setw(12) << "server" << std::right << std::setw(9) << "accepts" << std::setw(9) << "rejects"
     << std::setw(9) << "unknown" << std::setw(9) << "logins" << std::setw(10) << "eam_ok" << std::setw(10)
     << "eam_bad" << std::setw(12) << "pct_accept" << std::setw(10) << "pct_eam" << std::setw(11) << "acc_rate"
     << '\n';
  auto row = [&os](const ReportSummary& r) {
    os << std::left << std::setw(12) << r.server_id << std::right << std::setw(9) << r.accepts << std::setw(9)
       << r.rejects << std::setw(9) << r.unknown_attempts << std::setw(9) << r.total_logins << std::setw(10)
       << r.eam_valid << std::setw(10) << r.eam_invalid << std::fixed << std::setprecision(4) << std::setw(12)
       << r.pct_acceptance << std::setw(10) << r.pct_eam << std::setw(11) << r.acceptance_rate << '\n';
    os.unsetf(std::ios::fixed);
  };
  for (const auto& r : per_server) row(r);
  row(consolidated);
  os << "--- json\n";
  for (const auto& r : per_server) os << report_to_json(r) << '\n';
  os << report_to_json(consolidated) << '\n';
  return os.str();
}

void write_report(const std::filesystem::path& path, std::span<const ReportSummary> per_server,
                  const ReportSummary& consolidated) {
  std::ofstream out(path, std::ios::trunc);
  out << render_report(per_server, consolidated);
  if (!out) throw Error(Errc::io, "cannot write report to " + path.string());
}

}  // namespace saltbio
