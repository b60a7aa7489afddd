#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "clab/errors.hpp"
#include "clab/runner.hpp"
#include "clab/version.hpp"

namespace {

struct CommandSpec {
    const char* name;
    const char* help;
};

constexpr CommandSpec kCommands[] = {
    {"forward", "solve the reference system and dump the trajectory"},
    {"weights", "validate the weight geometry and scan the pointwise bounds"},
    {"carleman", "ensemble sweep of the weighted energy estimates"},
    {"carleman-sys", "coupled-system estimate over the perturbation family"},
    {"stab-b", "coefficient stability experiment"},
    {"stab-ic", "initial-condition log-stability experiment"},
    {"logconvexity", "log-convexity check of the data-driven split part"},
    {"reconstruct", "direct and least-squares coefficient reconstruction"},
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"carleman_lab: numerical experiments for coupled reaction-diffusion inverse problems"};
    app.set_version_flag("--version", clab::kVersion);
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::int64_t seed = -1;

    for (const CommandSpec& cmd : kCommands) {
        CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
        sub->add_option("--config", config_path, "scenario config file")->required();
        sub->add_option("--out", out_dir, "output directory (overrides experiment.out)");
        sub->add_option("--seed", seed, "seed override");
    }

    CLI11_PARSE(app, argc, argv);

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        const clab::ScenarioConfig cfg = clab::load_config(config_path);
        clab::RunOptions options;
        options.out_dir = out_dir;
        if (seed >= 0) options.seed = static_cast<std::uint64_t>(seed);
        return clab::run_command(command, cfg, options);
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
}
