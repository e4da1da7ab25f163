#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace syncfire {

// Exit code contract: 0 success, 1 domain failure (validation violations,
// output collisions), 2 usage/parse failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

struct CliOptions {
    std::string scenario_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";
    std::optional<int> repetitions;
    bool force = false;
    int verbosity = 0;
};

/// Prints every scenario invariant violation; 0 iff none, 2 on parse errors.
int cmd_validate(const CliOptions& options, std::ostream& out, std::ostream& err);

/// Runs the first configured interval once and dumps the event log to `out`.
int cmd_run(const CliOptions& options, std::ostream& out, std::ostream& err);

/// Runs the full interval x repetition sweep; writes records.csv,
/// summary_by_node.csv and summary_by_interval.csv into the output directory.
int cmd_sweep(const CliOptions& options, std::ostream& out, std::ostream& err);

/// Regenerates the reference-results artifacts (table3.csv, fig5.csv,
/// fig6.csv) from the canonical calibrated scenario.
int cmd_reproduce(const CliOptions& options, std::ostream& out, std::ostream& err);

}  // namespace syncfire
