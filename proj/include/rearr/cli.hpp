#pragma once

#include <optional>
#include <string>

#include "rearr/config.hpp"

namespace rearr {

// Exit code families shared by the CLI and the library-level runner.
enum ExitCode : int {
    kExitOk = 0,
    kExitInternal = 1,
    kExitConfig = 2,
    kExitStarvation = 3,
    kExitQuadrature = 4,
    kExitVerification = 5,
};

// Orchestrates one command (build | verify | split | fubini): runs the
// pipeline, writes <command>.csv into out_dir, returns the exit code.
int run(const RunConfig& config, const std::string& command, const std::string& out_dir,
        std::optional<double> tolerance_override = std::nullopt);

} // namespace rearr
