#pragma once

#include <string>
#include <vector>

namespace jamflow::cli {

// Runs one command-line invocation; `args` excludes the program name.
// Exit codes: 0 success, 2 usage error, 3 invalid scenario or
// configuration, 4 runtime failure.
int run_command(const std::vector<std::string>& args);

}  // namespace jamflow::cli
