#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace deltamap::cli {

/// Exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitDecodeFailure = 2;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitData = 65;

/// Runs one command line. Results go to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
/// Same, with args[0] as the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace deltamap::cli
