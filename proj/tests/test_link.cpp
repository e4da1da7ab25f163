#include "syncfire/link.hpp"

#include "helpers.hpp"

#include <doctest.h>

using namespace syncfire;
using namespace syncfire::testing;

namespace {

LinkModel spi_link() {
    LinkModel link;
    link.name = "spi";
    link.kind = LinkKind::WiredPointToPoint;
    link.endpoints = {0, 1};
    link.delay_min_ns = link.delay_max_ns = 10'000;
    return link;
}

LinkModel radio_link(Rat loss = Rat(0)) {
    LinkModel link;
    link.name = "radio";
    link.kind = LinkKind::WirelessBroadcast;
    link.endpoints = {0, 1, 2, 3};
    link.delay_min_ns = 2'000'000;
    link.delay_max_ns = 2'500'000;
    link.loss_probability = std::move(loss);
    return link;
}

}  // namespace

TEST_CASE("wired delivery is constant, both directions") {
    StreamSet streams(0);
    const LinkModel link = spi_link();
    for (int i = 0; i < 50; ++i) {
        const Rat t(i * 1'000'000);
        const DeliveryPlan fwd = deliver(link, 0, t, streams);
        REQUIRE(fwd.deliveries.size() == 1);
        CHECK(fwd.deliveries[0].receiver == 1);
        CHECK(fwd.deliveries[0].arrival_ns == t + Rat(10'000));
        const DeliveryPlan rev = deliver(link, 1, t, streams);
        CHECK(rev.deliveries[0].receiver == 0);
        CHECK(rev.deliveries[0].arrival_ns == t + Rat(10'000));
        CHECK(fwd.losses.empty());
    }
}

TEST_CASE("wired reverse delay applies to the second endpoint only") {
    StreamSet streams(0);
    LinkModel link = spi_link();
    link.reverse_delay_ns = 30'000;
    CHECK(deliver(link, 0, Rat(0), streams).deliveries[0].arrival_ns == Rat(10'000));
    CHECK(deliver(link, 1, Rat(0), streams).deliveries[0].arrival_ns == Rat(30'000));
}

TEST_CASE("wired links never reorder") {
    StreamSet streams(0);
    const LinkModel link = spi_link();
    Rat previous(-1);
    for (int i = 0; i < 200; ++i) {
        const Rat t(i * 777);
        const Rat arrival = deliver(link, 0, t, streams).deliveries[0].arrival_ns;
        CHECK(arrival > previous);
        previous = arrival;
    }
}

TEST_CASE("wireless broadcast reaches every other member within the band") {
    StreamSet streams(1);
    const LinkModel link = radio_link();
    const DeliveryPlan plan = deliver(link, 0, Rat(1'000'000'000), streams);
    CHECK(plan.deliveries.size() == 3);
    bool varied = false;
    for (const Delivery& d : plan.deliveries) {
        CHECK(d.receiver != 0);
        CHECK(d.arrival_ns >= Rat(1'002'000'000));
        CHECK(d.arrival_ns <= Rat(1'002'500'000));
        varied |= d.arrival_ns != plan.deliveries[0].arrival_ns;
    }
    CHECK(varied);  // independent draws per receiver
}

TEST_CASE("certain loss means no receiver") {
    StreamSet streams(2);
    const DeliveryPlan plan = deliver(radio_link(Rat(1)), 0, Rat(0), streams);
    CHECK(plan.deliveries.empty());
    CHECK(plan.losses.size() == 3);
}

TEST_CASE("every listener is accounted for: delivered or lost") {
    StreamSet streams(3);
    const LinkModel link = radio_link(Rat::of(1, 5));
    for (int i = 0; i < 300; ++i) {
        const DeliveryPlan plan = deliver(link, 0, Rat(i), streams);
        CHECK(plan.deliveries.size() + plan.losses.size() == 3);
    }
}

TEST_CASE("a sender must be attached to the link") {
    StreamSet streams(0);
    CHECK_THROWS_AS(deliver(spi_link(), 9, Rat(0), streams), ConfigError);
}
