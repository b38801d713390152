#pragma once

#include <ostream>

namespace unbiased {

/// Exit codes of the command-line front end.
enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitNoConvergence = 2,
    kExitVerificationFailed = 3,
};

/// Parses argv (argv[0] is the program name) and runs one subcommand:
/// solve, verify, polytope, symplectic or family.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace unbiased
