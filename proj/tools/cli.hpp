#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace awg::cli {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

/// Runs the command line `args` (program name excluded). Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace awg::cli
