#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace orthoglide::cli {

enum ExitCode : int {
  kSuccess = 0,
  kValidationError = 1,
  kNumericalError = 2,
  kSelfTestFailed = 3,
};

/// Environment variable naming the default configuration directory.
inline constexpr const char* kConfigDirEnv = "ORTHOGLIDE_CONFIG_DIR";

/// Runs the command line `args` (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace orthoglide::cli
