#pragma once

#include <iosfwd>

namespace nevsim::cli {

enum ExitCode : int { kSuccess = 0, kDataError = 1, kConfigError = 2 };

/// Entry point of the `nevsim` tool, with streams injectable for tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nevsim::cli
