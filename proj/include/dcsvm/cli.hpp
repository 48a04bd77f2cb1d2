#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dcsvm {

/// Exit statuses of the command-line tool.
enum ExitCode : int {
    exit_success = 0,
    exit_failure = 1,  // runtime failure
    exit_usage = 2,    // usage or validation error, missing input file
};

/// Runs the `dcsvm` command line (`args` excludes the program name) with subcommands train,
/// predict, inspect, compare and sweep. Returns the process exit status.
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace dcsvm
