#include "syncfire/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"syncfire — on-demand event synchronization for heterogeneous "
                 "sensor networks, simulated deterministically"};
    app.require_subcommand(1);

    syncfire::CliOptions options;

    const auto add_common = [&](CLI::App* cmd, bool needs_scenario) {
        if (needs_scenario)
            cmd->add_option("--scenario", options.scenario_path, "scenario file")->required();
        cmd->add_option("--seed", options.seed, "override the scenario seed (default 0)");
        cmd->add_option("--out", options.out_dir, "output directory");
        cmd->add_option("--reps", options.repetitions, "override repetition count");
        cmd->add_flag("--force", options.force, "overwrite existing output files");
        cmd->add_flag("-v", options.verbosity, "verbose progress on stderr (repeatable)");
    };

    CLI::App* validate = app.add_subcommand("validate", "check a scenario file");
    add_common(validate, true);
    CLI::App* run = app.add_subcommand("run", "run one simulation and dump the event log");
    add_common(run, true);
    CLI::App* sweep = app.add_subcommand("sweep", "run the full experiment sweep to CSV");
    add_common(sweep, true);
    CLI::App* reproduce =
        app.add_subcommand("reproduce", "regenerate the reference-results CSV artifacts");
    add_common(reproduce, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e);
        return syncfire::kExitOk;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return syncfire::kExitUsage;
    }

    if (validate->parsed()) return syncfire::cmd_validate(options, std::cout, std::cerr);
    if (run->parsed()) return syncfire::cmd_run(options, std::cout, std::cerr);
    if (sweep->parsed()) return syncfire::cmd_sweep(options, std::cout, std::cerr);
    return syncfire::cmd_reproduce(options, std::cout, std::cerr);
}
