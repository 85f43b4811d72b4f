#include "saltbio/error.hpp"

namespace saltbio {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::config: return "config";
    case Errc::domain: return "domain";
    case Errc::parameter: return "parameter";
    case Errc::framing: return "framing";
    case Errc::invalid_symbol: return "invalid_symbol";
    case Errc::no_inverse: return "no_inverse";
    case Errc::comparison: return "comparison";
    case Errc::conflict: return "conflict";
    case Errc::capacity: return "capacity";
    case Errc::not_found: return "not_found";
    case Errc::format: return "format";
    case Errc::io: return "io";
    case Errc::referral: return "referral";
    case Errc::transport: return "transport";
    case Errc::version: return "version";
    case Errc::session: return "session";
    case Errc::denied: return "denied";
  }
  return "unknown";
}

}  // namespace saltbio
