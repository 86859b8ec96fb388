#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace scenopt::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { ok = 0, failure = 1, usage = 2, infeasible = 3 };

// Runs the command line (args excludes the program name). Results go to
// `out`, diagnostics and usage text to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace scenopt::cli
