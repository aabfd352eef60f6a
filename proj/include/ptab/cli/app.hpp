#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ptab {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitDataError = 2,
    kExitConfigError = 3,
    kExitNumericError = 4,
};

/**
 * @brief Entry point of the `ptab` tool; `args` excludes the program name.
 *
 * Subcommands: test-iid, test-dynamic, simulate, power-study, bootstrap-env,
 * dist. Results go to --output (or `out`); one-line diagnostics go to `err`.
 */
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ptab
