#pragma once

#include "syncfire/clock.hpp"
#include "syncfire/rational.hpp"
#include "syncfire/rng.hpp"
#include "syncfire/ticks.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace syncfire {

enum class LinkKind { WirelessBroadcast, WiredPointToPoint };

/// A communication channel. Wireless links are broadcast domains: every
/// member hears every transmission, each reception with an independent delay
/// draw and an independent loss chance. Wired links connect exactly two
/// nodes, losslessly, with a constant delay (optionally different per
/// direction).
struct LinkModel {
    std::string name;
    LinkKind kind = LinkKind::WirelessBroadcast;
    std::vector<NodeIndex> endpoints;  // scenario order
    std::int64_t delay_min_ns = 0;
    std::int64_t delay_max_ns = 0;
    // Wired only: delay for transmissions from endpoints[1] to endpoints[0];
    // defaults to the forward delay.
    std::optional<std::int64_t> reverse_delay_ns;
    Rat loss_probability;  // wireless only

    bool has_endpoint(NodeIndex node) const;
    /// Constant delay from `from` to `to`; only meaningful for wired links.
    std::int64_t wired_delay(NodeIndex from) const;
};

struct Delivery {
    NodeIndex receiver;
    Rat arrival_ns;  // exact ground-truth arrival time
};

struct DeliveryPlan {
    std::vector<Delivery> deliveries;
    std::vector<NodeIndex> losses;
};

/// Plans the receptions of one transmission: each other endpoint receives at
/// send_time + delay draw, unless independently lost. Draws come from the
/// link's named delay/loss substreams.
DeliveryPlan deliver(const LinkModel& link, NodeIndex sender, const Rat& send_time_ns,
                     StreamSet& streams);

}  // namespace syncfire
