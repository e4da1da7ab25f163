#include "syncfire/oracle.hpp"

#include <vector>

namespace syncfire {

namespace {

// Constant delay for one directed transmission over a link.
Rat directed_delay(const LinkModel& link, NodeIndex from) {
    if (link.kind == LinkKind::WiredPointToPoint) return Rat(link.wired_delay(from));
    return Rat(link.delay_min_ns);
}

}  // namespace

std::map<NodeIndex, Rat> analytic_oracle(const Scenario& input) {
    Scenario sc = input;
    const auto violations = validate_scenario(sc);
    if (!violations.empty()) throw ConfigError("oracle: invalid scenario: " + violations.front());
    if (!sc.master || !sc.start_at_ns || sc.start_intervals_ticks.empty())
        throw ConfigError("oracle: scenario has no start signal");
    for (const auto& node : sc.nodes) {
        if (node.clock.jitter_bound_ppm != 0)
            throw ConfigError("oracle: node '" + node.name + "' has jitter; rejected");
        if (node.clock.timer_resolution_ns != 1)
            throw ConfigError("oracle: node '" + node.name + "' has a coarse timer; rejected");
    }
    for (const auto& link : sc.links) {
        if (link.delay_min_ns != link.delay_max_ns)
            throw ConfigError("oracle: link '" + link.name + "' has a random delay; rejected");
        if (!link.loss_probability.is_zero())
            throw ConfigError("oracle: link '" + link.name + "' is lossy; rejected");
    }

    const Rat master_fire = Rat(*sc.start_at_ns) + Rat(sc.start_intervals_ticks.front()) /
                                                       sc.nodes[*sc.master].clock.drift_factor;

    std::map<NodeIndex, Rat> fires;
    if (sc.master_fires) fires[*sc.master] = master_fire;

    // Accumulate the per-hop asymmetry term down the tree.
    std::vector<std::pair<NodeIndex, Rat>> frontier{{*sc.master, Rat(0)}};
    while (!frontier.empty()) {
        const auto [parent, offset] = frontier.back();
        frontier.pop_back();
        const EdgeSpec* active_edge = nullptr;
        for (const EdgeSpec& edge : sc.edges)
            if (edge.parent == parent && edge.active) active_edge = &edge;
        for (const EdgeSpec& edge : sc.edges) {
            if (edge.parent != parent) continue;
            const Rat down = directed_delay(sc.links[edge.via_link], parent);
            const Rat active_down = directed_delay(sc.links[active_edge->via_link], parent);
            const Rat active_up = directed_delay(sc.links[active_edge->via_link], active_edge->child);
            const Rat term = down - (active_down + active_up) / Rat(2);
            const Rat child_offset = offset + term;
            fires[edge.child] = master_fire + child_offset;
            frontier.emplace_back(edge.child, child_offset);
        }
    }
    return fires;
}

}  // namespace syncfire
