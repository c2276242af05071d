#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qcap::cli {

enum ExitCode { kOk = 0, kUsage = 1, kComputation = 2, kVerifyFailed = 3 };

/// Runs the command line `args` (without the program name), writing results
/// to `out` (or the --output file) and diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qcap::cli
