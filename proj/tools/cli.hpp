#pragma once

#include <string>
#include <vector>

namespace th::cli {

/// Exit codes of the command-line tool.
enum Exit : int {
  kOk = 0,
  kValidationFailed = 1,
  kPipelineError = 2,
  kInvariantViolated = 3,
  kUsage = 64,
};

/// Runs one command line (args[0] is the program name). JSON results go to
/// stdout, logs to stderr.
int run(const std::vector<std::string>& args);

}  // namespace th::cli
