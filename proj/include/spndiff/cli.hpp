#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace spndiff {

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitUsage = 2;

/// Runs one subcommand (ddt | scan | trails | verify | report). args[0] is
/// the program name. Machine output goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace spndiff
