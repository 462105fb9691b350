#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stepbench {

/// Runs the command line given argv (without the program name).
/// Exit codes: 0 success, 1 usage error, 2 runtime failure. Diagnostics go
/// to `err`, data to `out` or to the --output file.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace stepbench
