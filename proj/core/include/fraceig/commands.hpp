#pragma once

#include <ostream>
#include <string>

#include "fraceig/run_config.hpp"

namespace fraceig {

/// Exit codes of the batch front end.
enum ExitCode : int {
    kExitOk = 0,
    kExitConfigError = 1,
    kExitSolverFailure = 2,
    kExitSelftestFailure = 3,
};

/// Runs one subcommand (branch, lambda-star, extremal, uniqueness,
/// identities, props, selftest) with outputs under out_dir. Returns the
/// process exit code; diagnostics go to log.
int run_command(const std::string& subcommand, const RunConfig& cfg,
                const std::string& out_dir, std::ostream& log);

}  // namespace fraceig
