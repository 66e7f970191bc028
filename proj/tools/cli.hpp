#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sobol_eff::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kMalformedInput = 2,
  kDegenerate = 3,
  kInsufficientData = 4,
  kUnknownModel = 5,
  kMissingTruth = 6,
};

/// Runs one CLI invocation. `args` excludes the program name. Reports go to
/// `out` (or the --out file), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sobol_eff::cli
