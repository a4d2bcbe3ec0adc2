#pragma once

#include <cstdlib>
#include <filesystem>
#include <string>

#include <sys/wait.h>

#include "support/temp_dir.hpp"

namespace hsiseg::testing {

struct RunResult {
    int exit_code = -1;
    std::string output;  // stdout and stderr interleaved
};

// Runs `command` through the shell, capturing combined output via a scratch file.
inline RunResult run_command(const std::string& command) {
    TempDir scratch;
    const auto log = scratch / "out.txt";
    const std::string full = command + " > '" + log.string() + "' 2>&1";
    const int status = std::system(full.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.output = read_bytes(log);
    return r;
}

inline std::string quote(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

}  // namespace hsiseg::testing
