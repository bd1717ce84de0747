#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

namespace mgen {

struct ProcessResult {
    int exit_code = -1;  // -1 when killed by a signal or timed out
    bool timed_out = false;
    std::string output;  // interleaved stdout and stderr
    std::chrono::milliseconds duration{0};
};

/// Runs argv[0] (PATH lookup) in `cwd` with a wall-clock cap. The whole
/// process group is killed on timeout. Throws AdapterSpawnFailure if the
/// program cannot be executed.
ProcessResult run_process(const std::vector<std::string>& argv,
                          const std::filesystem::path& cwd,
                          std::chrono::milliseconds timeout);

}  // namespace mgen
