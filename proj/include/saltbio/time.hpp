#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace saltbio {

/// "YYYY-MM-DDTHH:MM:SSZ" for a non-negative unix time.
std::string format_rfc3339(std::int64_t unix_seconds);

/// "YYYY-MM-DD" (UTC) of a unix time.
std::string utc_date(std::int64_t unix_seconds);

/// Accepts plain unix seconds or an RFC 3339 timestamp with 'Z' or a
/// +HH:MM/-HH:MM offset; fractional seconds are truncated.
std::int64_t parse_time(std::string_view text);

std::int64_t wall_clock_seconds();

}  // namespace saltbio
