#include "syncfire/experiment.hpp"

#include "syncfire/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace syncfire {

namespace {

Role topology_role(const Scenario& sc, NodeIndex node) {
    if (sc.master && node == *sc.master) return Role::Master;
    for (const EdgeSpec& edge : sc.edges)
        if (edge.child == node) return edge.active ? Role::ActiveSlave : Role::PassiveSlave;
    return Role::Unsynced;
}

}  // namespace

ExperimentResult run_experiment(const Scenario& input) {
    Scenario sc = input;
    {
        const auto violations = validate_scenario(sc);
        if (!violations.empty()) {
            std::string what = "invalid scenario:";
            for (const auto& v : violations) what += "\n  - " + v;
            throw ConfigError(what);
        }
    }
    if (sc.start_intervals_ticks.empty())
        throw ConfigError("run_experiment: scenario configures no start intervals");

    ExperimentResult result;
    std::vector<NodeIndex> recorded_nodes;
    for (const EdgeSpec& edge : sc.edges) recorded_nodes.push_back(edge.child);
    if (sc.master && sc.master_fires) recorded_nodes.push_back(*sc.master);
    std::sort(recorded_nodes.begin(), recorded_nodes.end());

    int run_index = 0;
    for (std::size_t i = 0; i < sc.start_intervals_ticks.size(); ++i) {
        for (int rep = 0; rep < sc.repetitions; ++rep, ++run_index) {
            Scenario one = sc;
            one.start_intervals_ticks = {sc.start_intervals_ticks[i]};
            const std::uint64_t run_seed = derive_run_seed(sc.seed, i, rep);
            const RunResult run = run_simulation(one, run_seed);
            if (!run.complete) ++result.incomplete_runs;

            // Reference: the master's actual task execution when it fires,
            // otherwise its jitter-free scheduled deadline.
            std::optional<Rat> reference;
            std::map<NodeIndex, Rat> fires;
            for (const Record& record : run.log.records()) {
                if (record.kind == RecordKind::Fire) {
                    fires[record.node] = record.t_exact;
                } else if (record.kind == RecordKind::Deadline && !sc.master_fires) {
                    reference = *record.value;
                } else if (record.kind == RecordKind::Derived && record.value2) {
                    PropagationSample sample;
                    sample.run = run_index;
                    sample.node = record.node;
                    for (const EdgeSpec& edge : sc.edges)
                        if (edge.child == record.node)
                            sample.link_kind = sc.links[edge.via_link].kind;
                    sample.estimate_parent_ticks = *record.value2;
                    result.estimates.push_back(sample);
                }
            }
            if (sc.master_fires && sc.master && fires.count(*sc.master))
                reference = fires[*sc.master];

            for (const NodeIndex node : recorded_nodes) {
                RunRecord record;
                record.run = run_index;
                record.start_interval_ticks = sc.start_intervals_ticks[i];
                record.node = node;
                record.role = topology_role(sc, node);
                const auto it = fires.find(node);
                if (it != fires.end() && reference) {
                    record.fired = true;
                    record.fire_ns = it->second.round_to_i64();
                    record.exact_error = it->second - *reference;
                    record.error_ns = record.exact_error.round_to_i64();
                    record.abs_error_ns = record.error_ns < 0 ? -record.error_ns : record.error_ns;
                }
                result.records.push_back(std::move(record));
            }
        }
    }
    return result;
}

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records, GroupBy group_by,
                                  const std::vector<std::string>& node_names) {
    // Group keys in deterministic order: node index or interval value.
    std::map<std::int64_t, std::vector<const RunRecord*>> groups;
    for (const RunRecord& record : records) {
        const std::int64_t key = group_by == GroupBy::Node
                                     ? static_cast<std::int64_t>(record.node)
                                     : record.start_interval_ticks;
        groups[key].push_back(&record);
    }
    std::vector<SummaryRow> rows;
    for (const auto& [key, members] : groups) {
        SummaryRow row;
        row.group = group_by == GroupBy::Node
                        ? node_names[static_cast<std::size_t>(key)]
                        : ns_as_ms_trimmed(key);
        Rat sum;
        Rat sum_sq;
        for (const RunRecord* record : members) {
            if (!record->fired) {
                ++row.misses;
                continue;
            }
            const std::int64_t abs_ns = record->abs_error_ns;
            if (row.count == 0) {
                row.min_ns = row.max_ns = abs_ns;
            } else {
                row.min_ns = std::min(row.min_ns, abs_ns);
                row.max_ns = std::max(row.max_ns, abs_ns);
            }
            ++row.count;
            sum += Rat(abs_ns);
            sum_sq += Rat(abs_ns) * Rat(abs_ns);
        }
        if (row.count > 0) {
            row.has_stats = true;
            const Rat n(static_cast<std::int64_t>(row.count));
            row.mean_ns = sum / n;
            const Rat variance = sum_sq / n - row.mean_ns * row.mean_ns;
            row.stddev_ns = std::sqrt(std::max(0.0, variance.approx()));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string records_csv(const std::vector<RunRecord>& records,
                        const std::vector<std::string>& node_names) {
    std::string out = "run,start_interval_ms,node,role,fired,error_us,abs_error_us\n";
    for (const RunRecord& record : records) {
        out += std::to_string(record.run);
        out += ',';
        out += ns_as_ms_trimmed(record.start_interval_ticks);
        out += ',';
        out += node_names[record.node];
        out += ',';
        out += to_string(record.role);
        out += ',';
        out += record.fired ? "true" : "false";
        out += ',';
        if (record.fired) {
            out += ns_as_us(record.error_ns);
            out += ',';
            out += ns_as_us(record.abs_error_ns);
        } else {
            out += ',';
        }
        out += '\n';
    }
    return out;
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
    std::string out = "group,min_ms,max_ms,avg_ms,stddev_ms,misses\n";
    for (const SummaryRow& row : rows) {
        out += row.group;
        out += ',';
        if (row.has_stats) {
            out += ns_as_ms_us_precision(row.min_ns);
            out += ',';
            out += ns_as_ms_us_precision(row.max_ns);
            out += ',';
            out += ns_as_ms_us_precision(row.mean_ns.round_to_i64());
            out += ',';
            // stddev rounded to whole microseconds first, then printed in ms
            out += ns_as_ms_us_precision(static_cast<std::int64_t>(std::llround(row.stddev_ns)));
        } else {
            out += ",,,";  // all-miss group: flagged by empty statistics
        }
        out += ',';
        out += std::to_string(row.misses);
        out += '\n';
    }
    return out;
}

std::string propagation_csv(const ExperimentResult& result, const Scenario& scenario) {
    // Column sources: the master hop's active slave and the first wired hop.
    std::optional<NodeIndex> radio_node;
    std::optional<NodeIndex> wired_node;
    for (const EdgeSpec& edge : scenario.edges) {
        if (scenario.master && edge.parent == *scenario.master && edge.active &&
            scenario.links[edge.via_link].kind == LinkKind::WirelessBroadcast && !radio_node)
            radio_node = edge.child;
        if (scenario.links[edge.via_link].kind == LinkKind::WiredPointToPoint && edge.active &&
            !wired_node)
            wired_node = edge.child;
    }
    std::map<int, std::pair<std::optional<Rat>, std::optional<Rat>>> per_run;
    for (const PropagationSample& sample : result.estimates) {
        if (radio_node && sample.node == *radio_node)
            per_run[sample.run].first = sample.estimate_parent_ticks;
        else if (wired_node && sample.node == *wired_node)
            per_run[sample.run].second = sample.estimate_parent_ticks;
    }
    std::string out = "run,radio_us,spi_us\n";
    for (const auto& [run, values] : per_run) {
        out += std::to_string(run);
        out += ',';
        if (values.first) out += ns_as_us(values.first->round_to_i64());
        out += ',';
        if (values.second) out += ns_as_us(values.second->round_to_i64());
        out += '\n';
    }
    return out;
}

const std::string& canonical_scenario_text() {
    static const std::string text = R"(# Calibrated reference testbed: one initiator and four wireless slaves on a
# shared radio with millisecond timers, plus two microsecond-timer leaves
# attached to passive slaves by wire.
experiment {
  seed 0
  repetitions 100
  sync_at 0ms
  start_at 1500ms
  intervals 500ms
  sync_gap 500ms
  processing_delay 1ms
  master_fires false
}

nodes {
  master isense
  active isense
  ps1 isense
  ps2 isense
  ps3 isense
  atmel1 atmel48
  atmel2 atmel48
}

links {
  radio wireless members master active ps1 ps2 ps3 delay 2ms..2.5ms loss 0
  spi1 wired members ps1 atmel1 delay 10us
  spi2 wired members ps2 atmel2 delay 10us
}

hierarchy {
  master master
  master -> active via radio active
  master -> ps1 via radio
  master -> ps2 via radio
  master -> ps3 via radio
  ps1 -> atmel1 via spi1 active
  ps2 -> atmel2 via spi2 active
}
)";
    return text;
}

}  // namespace syncfire
