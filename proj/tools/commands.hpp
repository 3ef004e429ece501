#pragma once

// Subcommands of the nrcm tool.  Every command is a pure function of its
// arguments and input files, so repeated runs produce identical bytes.

#include <iosfwd>
#include <string>
#include <vector>

namespace nrcm::cli {

enum ExitCode : int {
  kSuccess = 0,
  kValidationError = 1,
  kSingular = 2,
  kNotConverged = 3,
};

inline constexpr const char* kVersion = "1.0.0";

/// Parses `args` (without the program name) and runs the subcommand.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Worker count from NRCM_WORKERS, falling back to the hardware concurrency.
unsigned worker_count();

}  // namespace nrcm::cli
