#pragma once

// `excr` subcommands. Exit codes: 0 success, 1 usage error, 2 data error.

#include <iosfwd>
#include <string>
#include <vector>

namespace excursion::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Parses `args` (without the program name) and runs the selected
/// subcommand. Normal output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace excursion::cli
