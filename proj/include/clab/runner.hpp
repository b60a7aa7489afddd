#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "clab/config.hpp"

namespace clab {

struct RunOptions {
    std::string out_dir;  // empty: use the config's experiment.out
    std::optional<uint64_t> seed;
};

/// Exit-code contract: 0 all checks pass, 2 a verification check failed,
/// 1 configuration or runtime error (raised as an exception; the CLI maps it).
///
/// Subcommands: forward, weights, carleman, carleman-sys, stab-b, stab-ic,
/// logconvexity, reconstruct. Each writes its CSV artifacts plus a
/// manifest.json with the resolved config, versions, seeds, and wall time.
int run_command(const std::string& command, const ScenarioConfig& config,
                const RunOptions& options);

}  // namespace clab
