#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ipmgen::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kFailure = 2 };

/// Runs one command line. `args` excludes the program name. Machine output
/// goes to `out`; progress, reports and diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ipmgen::cli
