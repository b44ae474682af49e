#pragma once

#include <iosfwd>

namespace kickrot::cli {

enum ExitCode : int { kOk = 0, kValidationError = 1, kRuntimeError = 2 };

/// Parses argv, validates, and runs the selected subcommand. Normal output
/// goes to `out`; diagnostics (one line per error) go to `err`.
int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kickrot::cli
