#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace saltbio::cli {

/// Runs one command line (args excludes the program name). Returns 0 on
/// success, 1 on a domain or I/O error, 2 on a usage error. Login rejections
/// are results, not errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace saltbio::cli
