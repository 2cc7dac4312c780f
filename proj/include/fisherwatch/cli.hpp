#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fisherwatch/core.hpp"

namespace fisherwatch::cli {

/// Process exit codes.
enum ExitCode : int { kOk = 0, kUnexpected = 1, kInputError = 2, kShapeError = 3 };

int exit_code_for(ErrorCode code) noexcept;

/// Entry point shared by the executable and the tests. args[0] is the
/// program name. Errors are reported on `err` as one line:
///   fisherwatch: error reason=<code> exit=<n> message=<text>
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fisherwatch::cli
