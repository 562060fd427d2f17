#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace geoscale::cli {

enum ExitCode : int { kSuccess = 0, kComputationError = 1, kInputError = 2 };

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name. Normal output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace geoscale::cli
