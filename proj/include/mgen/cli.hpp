#pragma once

#include <iosfwd>

namespace mgen::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kEnvironment = 2, kPartial = 3 };

/// Entry point for the `mgen` tool; returns the process exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mgen::cli
