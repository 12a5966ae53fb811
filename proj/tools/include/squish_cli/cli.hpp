#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace squish::cli {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitTimeout = 2;
constexpr int kExitUsage = 64;

constexpr const char* kToolVersion = "0.1.0";

// Runs the command line `args` (args[0] is the program name). Data goes to
// `out` unless redirected to files by flags; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace squish::cli
