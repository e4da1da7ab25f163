#pragma once

#include "syncfire/protocol.hpp"
#include "syncfire/scenario.hpp"
#include "syncfire/simulator.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace syncfire {

/// One node's outcome in one run: did it fire, and how far from the
/// reference instant (the master's own execution of the task).
struct RunRecord {
    int run = 0;  // interval-major global run index
    std::int64_t start_interval_ticks = 0;
    NodeIndex node = 0;
    Role role = Role::Unsynced;  // role within its parent hop
    bool fired = false;
    std::int64_t fire_ns = 0;   // ground-truth fire instant; valid iff fired
    std::int64_t error_ns = 0;  // signed, fire - reference; valid iff fired
    std::int64_t abs_error_ns = 0;
    Rat exact_error;  // exact difference, same sign convention
};

/// Propagation estimate derived by one node in one run, in its parent's
/// clock ticks.
struct PropagationSample {
    int run = 0;
    NodeIndex node = 0;
    LinkKind link_kind = LinkKind::WirelessBroadcast;
    Rat estimate_parent_ticks;
};

struct ExperimentResult {
    std::vector<RunRecord> records;
    std::vector<PropagationSample> estimates;
    int incomplete_runs = 0;
};

/// Runs start_intervals x repetitions fresh synchronizations and collects a
/// record per node expected to fire, in deterministic (interval, repetition,
/// node) order.
ExperimentResult run_experiment(const Scenario& scenario);

enum class GroupBy { Node, StartInterval };

struct SummaryRow {
    std::string group;
    std::uint64_t count = 0;   // fired records in the group
    std::uint64_t misses = 0;  // expected-but-missing fires
    std::int64_t min_ns = 0;
    std::int64_t max_ns = 0;
    Rat mean_ns;
    double stddev_ns = 0;
    bool has_stats = false;  // false for an all-miss group
};

/// Population statistics of absolute errors, with misses excluded from the
/// statistics but counted per group.
std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records, GroupBy group_by,
                                  const std::vector<std::string>& node_names);

// CSV renderings (exact column contracts; all text derived via integer
// arithmetic so outputs are byte-stable across platforms).
std::string records_csv(const std::vector<RunRecord>& records,
                        const std::vector<std::string>& node_names);
std::string summary_csv(const std::vector<SummaryRow>& rows);

/// run,radio_us,spi_us — per-run propagation estimates of the master hop's
/// active slave and of the first wired hop (column empty when absent).
std::string propagation_csv(const ExperimentResult& result, const Scenario& scenario);

/// The calibrated seven-node reference scenario shipped with the project.
const std::string& canonical_scenario_text();

}  // namespace syncfire
