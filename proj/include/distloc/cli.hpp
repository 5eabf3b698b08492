#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace distloc::cli {

enum ExitCode : int {
  kOk = 0,
  kUsageError = 1,
  kValidationFailure = 2,
  kTableFailure = 3,
};

/// Entry point behind the `distloc` binary. `args` excludes the program name.
/// Results go to `out` (or --output), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace distloc::cli
