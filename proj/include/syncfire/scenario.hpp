#pragma once

#include "syncfire/clock.hpp"
#include "syncfire/link.hpp"
#include "syncfire/ticks.hpp"
#include "syncfire/time.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace syncfire {

struct NodeSpec {
    std::string name;
    ClockModel clock;
};

/// One parent->child relation in the synchronization tree, carried over a
/// specific link; `active` marks the child that answers the parent.
struct EdgeSpec {
    NodeIndex parent = 0;
    NodeIndex child = 0;
    std::size_t via_link = 0;
    bool active = false;
};

/// A declarative experiment description: nodes with clock models, links,
/// the synchronization hierarchy, and the experiment parameters.
struct Scenario {
    std::vector<NodeSpec> nodes;
    std::vector<LinkModel> links;
    std::vector<EdgeSpec> edges;
    std::optional<NodeIndex> master;

    std::uint64_t seed = 0;
    int repetitions = 100;
    std::int64_t sync_at_ns = 0;
    std::optional<std::int64_t> start_at_ns;
    std::vector<std::int64_t> start_intervals_ticks;  // master clock ticks
    std::int64_t sync_gap_ticks = 500'000'000;        // Mark1 -> Mark2
    std::int64_t processing_delay_ticks = 1'000'000;  // Mark2 reception -> Reply
    std::optional<std::int64_t> reply_timeout_ticks;  // auto when absent
    std::optional<std::int64_t> horizon_ns;           // auto when absent
    bool master_fires = true;

    std::optional<NodeIndex> node_index(const std::string& name) const;
    std::vector<std::string> node_names() const;
};

/// Parses the scenario text format (see README for the grammar). Throws
/// ParseError with a line reference on malformed input.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

/// Checks every structural invariant and returns the full list of
/// violations (empty means valid). Also fills in the implicit active-slave
/// designation (lowest child name) where a hop has none.
std::vector<std::string> validate_scenario(Scenario& scenario);

}  // namespace syncfire
