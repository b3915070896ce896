#pragma once

#include <iosfwd>

namespace avrp::cli {

enum ExitCode {
  kOk = 0,
  kValidationFailure = 1,
  kUsageError = 2,
  kIoError = 3,
};

// Runs the avrp command line. Normal output goes to `out`, diagnostics to
// `err`. Never throws; every failure is mapped to an exit code.
int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err);

}  // namespace avrp::cli
