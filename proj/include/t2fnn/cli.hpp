#pragma once

#include <string>
#include <vector>

namespace t2fnn {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitInternal = 1,
    kExitUsage = 2,
    kExitDiverged = 3,
    kExitNonFinite = 4,
};

/// Entry point of the `t2fnn` tool; argv[0] is the program name.
int run_cli(const std::vector<std::string>& argv);

} // namespace t2fnn
