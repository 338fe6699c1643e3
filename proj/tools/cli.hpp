#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ggbayes::cli {

enum ExitCode { kOk = 0, kRuntime = 1, kUsage = 2 };

/// Runs one command. `args` excludes the program name, e.g. {"fit", "--data", "meeker"}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ggbayes::cli
