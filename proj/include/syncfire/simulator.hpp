#pragma once

#include "syncfire/event_log.hpp"
#include "syncfire/scenario.hpp"

#include <cstdint>
#include <vector>

namespace syncfire {

struct RunResult {
    EventLog log;
    bool complete = true;  // false when the horizon cut pending events
};

/// Executes one deterministic run: same (scenario, run_seed) in, byte-identical
/// event log out. The scenario must validate cleanly (throws ConfigError
/// otherwise).
RunResult run_simulation(const Scenario& scenario, std::uint64_t run_seed);

struct FireReport {
    struct Fired {
        NodeIndex node;
        GlobalTime at;
        Rat exact;
    };
    std::vector<Fired> fired;
    std::vector<NodeIndex> never_fired;  // nodes expected to fire that did not
};

/// Extracts task executions from a run log; nodes that were expected to fire
/// (every slave, plus the master when configured) but did not are listed
/// separately.
FireReport observe_fires(const Scenario& scenario, const EventLog& log);

/// The links a transmission from `sender` goes out on, by the protocol's
/// routing rules: replies and shares go on the sender's uplink, everything
/// else on the distinct downlinks toward its children.
std::vector<std::size_t> route_links(const Scenario& scenario, NodeIndex sender, MsgKind kind);

}  // namespace syncfire
