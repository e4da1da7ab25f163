#include "syncfire/cli.hpp"

#include "syncfire/experiment.hpp"
#include "syncfire/oracle.hpp"
#include "syncfire/rng.hpp"
#include "syncfire/scenario.hpp"
#include "syncfire/simulator.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace syncfire {

namespace {

struct OutputCollision : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_file(const std::string& dir, const std::string& name, const std::string& content,
                bool force) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const fs::path path = fs::path(dir) / name;
    if (!force && fs::exists(path))
        throw OutputCollision("refusing to overwrite " + path.string() + " (use --force)");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

std::optional<Scenario> load_checked(const CliOptions& options, std::ostream& err, int& exit_code) {
    Scenario sc;
    try {
        sc = load_scenario(options.scenario_path);
    } catch (const ParseError& e) {
        err << options.scenario_path << ": " << e.what() << "\n";
        exit_code = kExitUsage;
        return std::nullopt;
    }
    const auto violations = validate_scenario(sc);
    if (!violations.empty()) {
        for (const auto& violation : violations) err << "violation: " << violation << "\n";
        exit_code = kExitDomain;
        return std::nullopt;
    }
    if (options.seed) sc.seed = *options.seed;
    if (options.repetitions) sc.repetitions = *options.repetitions;
    return sc;
}

}  // namespace

int cmd_validate(const CliOptions& options, std::ostream& out, std::ostream& err) {
    Scenario sc;
    try {
        sc = load_scenario(options.scenario_path);
    } catch (const ParseError& e) {
        err << options.scenario_path << ": " << e.what() << "\n";
        return kExitUsage;
    }
    const auto violations = validate_scenario(sc);
    if (violations.empty()) {
        out << options.scenario_path << ": ok (" << sc.nodes.size() << " node(s), "
            << sc.links.size() << " link(s))\n";
        return kExitOk;
    }
    for (const auto& violation : violations) out << "violation: " << violation << "\n";
    return kExitDomain;
}

int cmd_run(const CliOptions& options, std::ostream& out, std::ostream& err) {
    int exit_code = kExitOk;
    const auto sc = load_checked(options, err, exit_code);
    if (!sc) return exit_code;
    try {
        const RunResult result = run_simulation(*sc, derive_run_seed(sc->seed, 0, 0));
        out << result.log.serialize(sc->node_names());
        const FireReport fires = observe_fires(*sc, result.log);
        if (options.verbosity > 0) {
            err << fires.fired.size() << " node(s) fired";
            if (!fires.never_fired.empty()) {
                err << "; never fired:";
                for (const NodeIndex node : fires.never_fired) err << " " << sc->nodes[node].name;
            }
            err << (result.complete ? "" : "; run incomplete at horizon") << "\n";
        }
        return result.complete ? kExitOk : kExitDomain;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitDomain;
    }
}

int cmd_sweep(const CliOptions& options, std::ostream& out, std::ostream& err) {
    int exit_code = kExitOk;
    const auto sc = load_checked(options, err, exit_code);
    if (!sc) return exit_code;
    try {
        const ExperimentResult result = run_experiment(*sc);
        const auto names = sc->node_names();
        write_file(options.out_dir, "records.csv", records_csv(result.records, names),
                   options.force);
        write_file(options.out_dir, "summary_by_node.csv",
                   summary_csv(summarize(result.records, GroupBy::Node, names)), options.force);
        write_file(options.out_dir, "summary_by_interval.csv",
                   summary_csv(summarize(result.records, GroupBy::StartInterval, names)),
                   options.force);
        out << summary_csv(summarize(result.records, GroupBy::StartInterval, names));
        if (options.verbosity > 0)
            err << result.records.size() << " record(s), " << result.incomplete_runs
                << " incomplete run(s)\n";
        return kExitOk;
    } catch (const OutputCollision& e) {
        err << e.what() << "\n";
        return kExitDomain;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitDomain;
    }
}

int cmd_reproduce(const CliOptions& options, std::ostream& out, std::ostream& err) {
    try {
        Scenario base = parse_scenario(canonical_scenario_text());
        {
            const auto violations = validate_scenario(base);
            if (!violations.empty()) throw ConfigError("embedded scenario invalid: " + violations.front());
        }
        if (options.seed) base.seed = *options.seed;
        if (options.repetitions) base.repetitions = *options.repetitions;
        const auto names = base.node_names();

        // Deep run at the reference interval: per-node error table and the
        // per-run propagation estimates.
        Scenario deep = base;
        deep.start_intervals_ticks = {500'000'000};
        const ExperimentResult deep_result = run_experiment(deep);
        write_file(options.out_dir, "table3.csv",
                   summary_csv(summarize(deep_result.records, GroupBy::Node, names)),
                   options.force);
        write_file(options.out_dir, "fig6.csv", propagation_csv(deep_result, deep), options.force);

        // Interval sweep for the error-versus-interval trend.
        Scenario sweep = base;
        sweep.start_intervals_ticks.clear();
        for (std::int64_t ms = 50; ms <= 800; ms += 50)
            sweep.start_intervals_ticks.push_back(ms * 1'000'000);
        const ExperimentResult sweep_result = run_experiment(sweep);
        write_file(options.out_dir, "fig5.csv",
                   summary_csv(summarize(sweep_result.records, GroupBy::StartInterval, names)),
                   options.force);

        out << "wrote table3.csv fig5.csv fig6.csv to " << options.out_dir << "\n";
        if (options.verbosity > 0)
            err << deep_result.records.size() + sweep_result.records.size() << " record(s) total\n";
        return kExitOk;
    } catch (const OutputCollision& e) {
        err << e.what() << "\n";
        return kExitDomain;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitDomain;
    }
}

}  // namespace syncfire
