#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace skelrepair::cli {

enum ExitCode : int { kOk = 0, kUnexpected = 1, kIo = 2, kFormat = 3, kConfig = 4 };

/// Default worker count for batch commands when --threads is not given.
inline constexpr const char* kThreadsEnv = "SKELREPAIR_THREADS";

/// Runs one command line (args[0] is the program name) and returns its exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace skelrepair::cli
