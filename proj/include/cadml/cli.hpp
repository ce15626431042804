#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cadml::cli {

enum ExitCode : int { kSuccess = 0, kUsage = 1, kDataError = 2, kTrainingError = 3 };

/// Runs one invocation of the command-line tool. `args` excludes the program
/// name. Reports go to `out` (or --out), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace cadml::cli
