#pragma once

#include <iosfwd>

namespace symctl::cli {

enum ExitCode : int {
  kOk = 0,
  kValidation = 1,
  kConvergence = 2,
  kMissionIncomplete = 3,
};

/// Runs one `symctl` subcommand; primary output goes to `out`, diagnostics
/// to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace symctl::cli
