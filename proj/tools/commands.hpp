#pragma once

#include <json.hpp>

#include "run_config.hpp"

namespace dv::cli {

struct CommandOutcome {
    int exit_code = 0;
    nlohmann::json summary = nlohmann::json::object();  // copied into the manifest
};

// Runs one command, writing its artifacts into cfg.output_dir (which must exist).
CommandOutcome run_command(const RunConfig& cfg);

}  // namespace dv::cli
