#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gpsim::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kInputError = 2;   // unreadable or malformed input
inline constexpr int kProcessError = 3; // a processing stage failed
inline constexpr int kUsageError = 64;

// Runs one invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gpsim::cli
