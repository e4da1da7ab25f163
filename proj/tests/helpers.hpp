#pragma once

#include "syncfire/event_log.hpp"
#include "syncfire/scenario.hpp"

#include <map>
#include <string>
#include <tuple>
#include <vector>

namespace syncfire::testing {

inline ClockModel ideal_clock() { return ClockModel{}; }

inline ClockModel clock_of(std::int64_t drift_num, std::int64_t drift_den,
                           std::int64_t jitter_ppm = 0, std::int64_t resolution_ns = 1) {
    ClockModel model;
    model.drift_factor = Rat::of(drift_num, drift_den);
    model.jitter_bound_ppm = jitter_ppm;
    model.timer_resolution_ns = resolution_ns;
    return model;
}

/// Programmatic scenario assembly for tests.
struct Builder {
    Scenario sc;

    Builder() {
        sc.repetitions = 1;
        sc.master_fires = true;
    }

    NodeIndex node(const std::string& name, ClockModel clock) {
        clock.rng_stream = "jitter/" + name;
        sc.nodes.push_back({name, std::move(clock)});
        return static_cast<NodeIndex>(sc.nodes.size() - 1);
    }

    std::size_t wireless(const std::string& name, std::vector<NodeIndex> members,
                         std::int64_t delay_min, std::int64_t delay_max, Rat loss = Rat(0)) {
        LinkModel link;
        link.name = name;
        link.kind = LinkKind::WirelessBroadcast;
        link.endpoints = std::move(members);
        link.delay_min_ns = delay_min;
        link.delay_max_ns = delay_max;
        link.loss_probability = std::move(loss);
        sc.links.push_back(std::move(link));
        return sc.links.size() - 1;
    }

    std::size_t wired(const std::string& name, NodeIndex a, NodeIndex b, std::int64_t delay,
                      std::optional<std::int64_t> reverse = std::nullopt) {
        LinkModel link;
        link.name = name;
        link.kind = LinkKind::WiredPointToPoint;
        link.endpoints = {a, b};
        link.delay_min_ns = delay;
        link.delay_max_ns = delay;
        link.reverse_delay_ns = reverse;
        sc.links.push_back(std::move(link));
        return sc.links.size() - 1;
    }

    void edge(NodeIndex parent, NodeIndex child, std::size_t via, bool active = false) {
        sc.edges.push_back({parent, child, via, active});
    }
};

/// A two-node scenario over one wired link: the workhorse for exactness
/// checks. Gap/processing/start values are exact-friendly defaults.
inline Scenario two_node_wired(ClockModel master_clock, ClockModel slave_clock,
                               std::int64_t delay_ns,
                               std::optional<std::int64_t> reverse_ns = std::nullopt,
                               std::int64_t interval_ticks = 500'000'000) {
    Builder b;
    const NodeIndex master = b.node("master", std::move(master_clock));
    const NodeIndex slave = b.node("slave", std::move(slave_clock));
    const std::size_t wire = b.wired("wire", master, slave, delay_ns, reverse_ns);
    b.edge(master, slave, wire, true);
    b.sc.master = master;
    b.sc.sync_gap_ticks = 100'000'000;
    b.sc.processing_delay_ticks = 1'000'000;
    b.sc.start_at_ns = 1'500'000'000;
    b.sc.start_intervals_ticks = {interval_ticks};
    return b.sc;
}

/// Transmission counts per (session, message kind) and per sender.
struct TraceCounts {
    std::map<std::pair<SessionId, MsgKind>, int> per_session_kind;
    std::map<NodeIndex, int> sends_by_node;
    std::map<SessionId, int> starts_by_session;
    std::map<SessionId, int> protocol_sends_by_session;
};

inline TraceCounts count_sends(const EventLog& log) {
    TraceCounts counts;
    for (const Record& record : log.records()) {
        if (record.kind != RecordKind::Send) continue;
        ++counts.sends_by_node[record.node];
        ++counts.per_session_kind[{*record.session, *record.msg}];
        if (*record.msg == MsgKind::Start)
            ++counts.starts_by_session[*record.session];
        else
            ++counts.protocol_sends_by_session[*record.session];
    }
    return counts;
}

}  // namespace syncfire::testing
