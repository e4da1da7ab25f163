#include "syncfire/link.hpp"

#include <algorithm>

namespace syncfire {

bool LinkModel::has_endpoint(NodeIndex node) const {
    return std::find(endpoints.begin(), endpoints.end(), node) != endpoints.end();
}

std::int64_t LinkModel::wired_delay(NodeIndex from) const {
    if (from == endpoints[0] || !reverse_delay_ns) return delay_min_ns;
    return *reverse_delay_ns;
}

DeliveryPlan deliver(const LinkModel& link, NodeIndex sender, const Rat& send_time_ns,
                     StreamSet& streams) {
    if (!link.has_endpoint(sender))
        throw ConfigError("node " + std::to_string(sender) + " transmits on link '" + link.name +
                          "' it is not attached to");
    DeliveryPlan plan;
    if (link.kind == LinkKind::WiredPointToPoint) {
        const NodeIndex peer = link.endpoints[0] == sender ? link.endpoints[1] : link.endpoints[0];
        plan.deliveries.push_back({peer, send_time_ns + Rat(link.wired_delay(sender))});
        return plan;
    }
    Rng& delay_stream = streams.stream("delay/" + link.name);
    Rng& loss_stream = streams.stream("loss/" + link.name);
    for (const NodeIndex receiver : link.endpoints) {
        if (receiver == sender) continue;
        // Draw the delay before the loss decision so stream positions do not
        // depend on loss outcomes.
        const std::int64_t delay =
            link.delay_min_ns == link.delay_max_ns
                ? link.delay_min_ns
                : delay_stream.uniform(link.delay_min_ns, link.delay_max_ns);
        const bool lost = !link.loss_probability.is_zero() && loss_stream.chance(link.loss_probability);
        if (lost)
            plan.losses.push_back(receiver);
        else
            plan.deliveries.push_back({receiver, send_time_ns + Rat(delay)});
    }
    return plan;
}

}  // namespace syncfire
