#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lassodiag {

/// Exit codes of the command-line driver.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitSolver = 3,
  kExitInfeasible = 4,
};

/// Runs one subcommand (boundary, region, dt, asymptotic, simulate, achieve).
/// args excludes the program name. Data goes to `out` unless --out names a file.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lassodiag
