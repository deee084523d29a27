#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace varsparse {

/// Exit codes of the command line tool.
enum ExitCode : int { kExitPass = 0, kExitCheckFailed = 1, kExitConfigError = 2 };

/// Runs the command line tool. `args` excludes the program name.
/// Subcommands: norm, weights, sparse, verify, dominate, report.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace varsparse
