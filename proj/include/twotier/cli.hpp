#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace twotier::cli {

/// Process exit codes; a stable contract for scripts.
enum ExitCode : int {
    kSuccess = 0,
    kUsage = 2,              // bad flags, unknown config keys, invalid values
    kIo = 3,                 // unreadable/unwritable files, malformed input files
    kInsufficientData = 4,   // too few days for a split, model or history
    kBadReference = 5,       // e.g. a --day that is not in the data
};

/// Runs the command line `args` (args[0] is the program name) and returns
/// the exit code. Normal output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace twotier::cli
