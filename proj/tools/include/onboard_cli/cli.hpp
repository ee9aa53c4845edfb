#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace onboard::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kInputSchema = 2,
  kPipeline = 3,
  kArtifactMismatch = 4,
};

/// Runs one subcommand. `args` excludes the program name. Human-readable
/// summaries go to `out`, diagnostics to `err`; results are written as files.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace onboard::cli
