#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace topocp::cli {

enum ExitCode { kOk = 0, kUsage = 1, kIo = 2, kParameter = 3, kComputation = 4 };

/// Runs one command line (args[0] is the program name). Human-readable
/// output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace topocp::cli
