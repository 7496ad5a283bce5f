#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mihkit::cli {

/// Exit codes of the mihkit command.
enum ExitCode : int {
    kSuccess = 0,
    kValidationFailure = 1,  // import or verification rejected
    kBadInput = 2,           // malformed input or usage
    kIntegrityFailure = 3,   // broken audit chain
};

/// Runs the command line `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mihkit::cli
