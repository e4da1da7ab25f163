// Acceptance suite: one test case per criterion, each printing a single
// [PASS]/[FAIL] line. Run via ctest or directly as build/tests/syncfire_acceptance.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "syncfire/cli.hpp"
#include "syncfire/experiment.hpp"
#include "syncfire/oracle.hpp"
#include "syncfire/rng.hpp"
#include "syncfire/simulator.hpp"

#include "helpers.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

using namespace syncfire;
using namespace syncfire::testing;

namespace {

struct Criterion {
    Criterion(int number_, const char* name_) : number(number_), name(name_) {}

    int number;
    const char* name;
    bool ok = true;
    std::string detail;

    void require(bool condition, const std::string& why = {}) {
        if (!condition && ok) {
            ok = false;
            detail = why;
        }
        CHECK(condition);
    }

    ~Criterion() {
        std::printf("[%s] criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", number, name,
                    detail.empty() ? "" : " — ", detail.c_str());
        std::fflush(stdout);
    }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

/// Randomized deterministic zero-jitter scenario: 1-3 hops, wireless hops
/// with up to three passive listeners, wired hops with a single child.
Scenario random_exact_scenario(Rng& rng) {
    Builder b;
    const auto drift = [&] {
        return clock_of(1'000'000 + rng.uniform(-19'999, 29'999), 1'000'000);
    };
    const int hops = static_cast<int>(rng.uniform(1, 3));
    const std::int64_t gap = rng.uniform(50, 200) * 1'000'000;
    const std::int64_t proc = rng.uniform(200, 2'000) * 1'000;
    NodeIndex parent = b.node("n0", drift());
    b.sc.master = parent;
    int next_name = 1;
    for (int hop = 0; hop < hops; ++hop) {
        const bool wireless = rng.uniform(0, 1) == 1;
        const std::int64_t delay = rng.uniform(10'000, 5'000'000);
        NodeIndex active;
        if (wireless) {
            const int passives = static_cast<int>(rng.uniform(0, 3));
            std::vector<NodeIndex> members{parent};
            active = b.node("n" + std::to_string(next_name++), drift());
            members.push_back(active);
            std::vector<NodeIndex> children{active};
            for (int p = 0; p < passives; ++p) {
                const NodeIndex node = b.node("n" + std::to_string(next_name++), drift());
                members.push_back(node);
                children.push_back(node);
            }
            const std::size_t link =
                b.wireless("link" + std::to_string(hop), members, delay, delay);
            for (const NodeIndex child : children)
                b.edge(parent, child, link, child == active);
        } else {
            active = b.node("n" + std::to_string(next_name++), drift());
            const std::size_t link =
                b.wired("link" + std::to_string(hop), parent, active, delay);
            b.edge(parent, active, link, true);
        }
        parent = active;  // the active slave relays to the next hop
    }
    b.sc.sync_gap_ticks = gap;
    b.sc.processing_delay_ticks = proc;
    b.sc.start_intervals_ticks = {rng.uniform(50, 800) * 1'000'000};
    // Sessions run hop after hop; leave generous room before the start signal.
    b.sc.start_at_ns = (hops + 1) * (gap + proc + 60'000'000) * 2;
    b.sc.master_fires = true;
    return b.sc;
}

Scenario canonical() {
    Scenario sc = parse_scenario(canonical_scenario_text());
    const auto violations = validate_scenario(sc);
    REQUIRE(violations.empty());
    return sc;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace

TEST_CASE("criterion 1: exactness theorem over randomized zero-jitter scenarios") {
    Criterion criterion{1, "exactness theorem (200 scenarios, 0 ns tolerance)"};
    const auto start = std::chrono::steady_clock::now();
    Rng rng(20260810);
    int checked_nodes = 0;
    for (int i = 0; i < 200; ++i) {
        const Scenario sc = random_exact_scenario(rng);
        const auto oracle = analytic_oracle(sc);
        const RunResult result = run_simulation(sc, derive_run_seed(0, 0, i));
        criterion.require(result.complete, "run hit the horizon");
        std::map<NodeIndex, Rat> fires;
        for (const Record& record : result.log.records())
            if (record.kind == RecordKind::Fire) fires.emplace(record.node, record.t_exact);
        criterion.require(fires.size() == oracle.size(), "fire count != oracle count");
        for (const auto& [node, expected] : oracle) {
            const auto it = fires.find(node);
            criterion.require(it != fires.end(), "synced node never fired");
            if (it != fires.end())
                criterion.require(it->second == expected,
                                  "fire deviates from the oracle (scenario " + std::to_string(i) +
                                      ", " + sc.nodes[node].name + ")");
            ++checked_nodes;
        }
    }
    criterion.require(checked_nodes >= 400);  // a real corpus, not a triviality
    const double elapsed = seconds_since(start);
    criterion.require(elapsed < 10.0, "runtime " + std::to_string(elapsed) + " s");
}

TEST_CASE("criterion 2: five protocol messages plus one start, silent passives") {
    Criterion criterion{2, "message-count invariant for 1..10 passive slaves"};
    for (int passives = 1; passives <= 10; ++passives) {
        Builder b;
        const NodeIndex master = b.node("master", clock_of(4999, 5000, 1550, 1'000'000));
        std::vector<NodeIndex> members{master};
        std::vector<NodeIndex> children;
        const NodeIndex active = b.node("active", clock_of(6143, 6000, 1250, 1000));
        members.push_back(active);
        children.push_back(active);
        for (int p = 0; p < passives; ++p) {
            const NodeIndex node =
                b.node("p" + std::to_string(p), clock_of(4999, 5000, 1550, 1'000'000));
            members.push_back(node);
            children.push_back(node);
        }
        const std::size_t radio = b.wireless("radio", members, 2'000'000, 2'500'000);
        for (const NodeIndex child : children) b.edge(master, child, radio, child == active);
        b.sc.master = master;
        b.sc.start_at_ns = 1'000'000'000;
        b.sc.start_intervals_ticks = {500'000'000};
        const RunResult result = run_simulation(b.sc, 100 + passives);
        const TraceCounts counts = count_sends(result.log);
        criterion.require(counts.protocol_sends_by_session.size() == 1);
        for (const auto& [session, total] : counts.protocol_sends_by_session) {
            criterion.require(total == 5, "protocol sends != 5");
            for (const MsgKind kind : {MsgKind::Mark1, MsgKind::Mark2, MsgKind::Reply,
                                       MsgKind::Report, MsgKind::Share})
                criterion.require(counts.per_session_kind.at({session, kind}) == 1);
        }
        criterion.require(counts.starts_by_session.size() == 1, "starts != 1 session");
        for (const auto& [session, total] : counts.starts_by_session)
            criterion.require(total == 1, "start count != 1");
        // Passive slaves never transmit (they have nothing to forward here).
        for (const NodeIndex child : children)
            if (child != active)
                criterion.require(counts.sends_by_node.count(child) == 0,
                                  "a passive slave transmitted");
    }
    // Hierarchical corpus: one start and five messages per hop.
    const RunResult fig = run_simulation(canonical(), 1);
    const TraceCounts counts = count_sends(fig.log);
    criterion.require(counts.protocol_sends_by_session.size() == 3, "expected 3 hops");
    for (const auto& [session, total] : counts.protocol_sends_by_session)
        criterion.require(total == 5);
    for (const auto& [session, total] : counts.starts_by_session)
        criterion.require(total == 1);
}

TEST_CASE("criterion 3: per-node error statistics on the calibrated testbed") {
    Criterion criterion{3, "calibrated 500 ms error table (>= 100 repetitions)"};
    const auto start = std::chrono::steady_clock::now();
    Scenario sc = canonical();
    REQUIRE(sc.repetitions >= 100);
    const ExperimentResult result = run_experiment(sc);
    const auto rows = summarize(result.records, GroupBy::Node, sc.node_names());
    criterion.require(rows.size() == 6, "expected six slave rows");
    for (const SummaryRow& row : rows) {
        criterion.require(row.has_stats && row.misses == 0, row.group + ": misses");
        const double mean_ms = row.mean_ns.approx() / 1e6;
        const double max_ms = static_cast<double>(row.max_ns) / 1e6;
        if (row.group.rfind("atmel", 0) == 0) {
            criterion.require(mean_ms >= 0.7 && mean_ms <= 5.0,
                              row.group + " mean " + std::to_string(mean_ms) + " ms");
        } else {
            criterion.require(mean_ms >= 0.2 && mean_ms <= 2.0,
                              row.group + " mean " + std::to_string(mean_ms) + " ms");
            criterion.require(max_ms <= 3.0,
                              row.group + " max " + std::to_string(max_ms) + " ms");
        }
    }
    const double elapsed = seconds_since(start);
    criterion.require(elapsed < 30.0, "runtime " + std::to_string(elapsed) + " s");
}

TEST_CASE("criterion 4: error trend over the 50..800 ms interval sweep") {
    Criterion criterion{4, "interval sweep trend (mean in band, max grows)"};
    Scenario sc = canonical();
    sc.start_intervals_ticks.clear();
    for (std::int64_t ms = 50; ms <= 800; ms += 50)
        sc.start_intervals_ticks.push_back(ms * 1'000'000);
    const ExperimentResult result = run_experiment(sc);
    const auto rows = summarize(result.records, GroupBy::StartInterval, sc.node_names());
    criterion.require(rows.size() == 16);
    for (const SummaryRow& row : rows) {
        const double mean_ms = row.mean_ns.approx() / 1e6;
        criterion.require(mean_ms >= 0.3 && mean_ms <= 3.0,
                          "mean at " + row.group + " ms: " + std::to_string(mean_ms));
    }
    criterion.require(rows.back().max_ns > rows.front().max_ns,
                      "max(800 ms) does not exceed max(50 ms)");
}

TEST_CASE("criterion 5: propagation estimates match the configured channels") {
    Criterion criterion{5, "propagation: radio in [2, 2.5] ms band, wire exact"};
    // Calibrated run: wireless estimates inside the configured band plus the
    // residual measurement envelope (clock jitter over the exchange).
    Scenario sc = canonical();
    const ExperimentResult result = run_experiment(sc);
    const std::string csv = propagation_csv(result, sc);
    criterion.require(csv.rfind("run,radio_us,spi_us\n", 0) == 0, "fig6 schema");
    const NodeIndex radio_node = *sc.node_index("active");
    const NodeIndex wired_node = *sc.node_index("atmel1");
    int radio_samples = 0;
    for (const PropagationSample& sample : result.estimates) {
        if (sample.node == radio_node) {
            ++radio_samples;
            const double us = sample.estimate_parent_ticks.approx() / 1e3;
            criterion.require(us > 2000.0 - 25.0 && us < 2500.0 + 25.0,
                              "radio estimate " + std::to_string(us) + " us");
        }
    }
    criterion.require(radio_samples == sc.repetitions, "one radio estimate per run");

    // Zero clock jitter, calibrated drifts: the wire estimate is the exact
    // constant delay in parent ticks, run after run.
    Scenario no_jitter = sc;
    no_jitter.repetitions = 20;
    for (NodeSpec& node : no_jitter.nodes) node.clock.jitter_bound_ppm = 0;
    const Rat expected_ticks = Rat(10'000) * clock_preset("isense").drift_factor;
    const ExperimentResult quiet = run_experiment(no_jitter);
    int wired_samples = 0;
    for (const PropagationSample& sample : quiet.estimates)
        if (sample.node == wired_node || sample.node == *sc.node_index("atmel2")) {
            ++wired_samples;
            criterion.require(sample.estimate_parent_ticks == expected_ticks,
                              "wire estimate drifted: " + sample.estimate_parent_ticks.str());
        }
    criterion.require(wired_samples == 2 * no_jitter.repetitions);

    // Ideal drifts on top: the wire estimate is exactly 10 us.
    Scenario ideal = no_jitter;
    for (NodeSpec& node : ideal.nodes) node.clock = ideal_clock();
    const ExperimentResult perfect = run_experiment(ideal);
    for (const PropagationSample& sample : perfect.estimates) {
        if (sample.link_kind == LinkKind::WiredPointToPoint)
            criterion.require(sample.estimate_parent_ticks == Rat(10'000),
                              "ideal wire estimate != 10 us exactly");
        else
            criterion.require(sample.estimate_parent_ticks >= Rat(2'000'000) &&
                                  sample.estimate_parent_ticks <= Rat(2'500'000),
                              "ideal radio estimate outside [2, 2.5] ms");
    }
}

TEST_CASE("criterion 6: configured asymmetry shifts the slave by delta/2") {
    Criterion criterion{6, "asymmetry law: error = delta/2 within one tick"};
    for (const std::int64_t delta_us : {0LL, 500LL, 1000LL, 2000LL}) {
        const std::int64_t delta = delta_us * 1000;
        const Scenario sc = two_node_wired(clock_of(101, 100), clock_of(99, 100),
                                           2'000'000 + delta, 2'000'000);
        const RunResult result = run_simulation(sc, 42);
        std::map<NodeIndex, Rat> fires;
        for (const Record& record : result.log.records())
            if (record.kind == RecordKind::Fire) fires.emplace(record.node, record.t_exact);
        REQUIRE(fires.size() == 2);
        const Rat error = fires.at(1) - fires.at(0);
        const Rat expected = Rat(delta) / Rat(2);
        const Rat deviation = error - expected;
        criterion.require(deviation <= Rat(1) && deviation >= Rat(-1),
                          "delta " + std::to_string(delta_us) + " us: error " + error.str());
    }
}

TEST_CASE("criterion 7: byte-identical artifacts from a fixed seed") {
    Criterion criterion{7, "deterministic reproduce (byte-identical CSVs)"};
    namespace fs = std::filesystem;
    const fs::path base = fs::temp_directory_path() / "syncfire_acceptance_repro";
    fs::remove_all(base);
    std::ostringstream out, err;
    for (const char* sub : {"a", "b"}) {
        CliOptions options;
        options.out_dir = (base / sub).string();
        REQUIRE(cmd_reproduce(options, out, err) == kExitOk);
    }
    for (const char* name : {"table3.csv", "fig5.csv", "fig6.csv"})
        criterion.require(slurp(base / "a" / name) == slurp(base / "b" / name),
                          std::string(name) + " differs between invocations");
    // Collision without --force is refused; --force regenerates identically.
    CliOptions options;
    options.out_dir = (base / "a").string();
    criterion.require(cmd_reproduce(options, out, err) == kExitDomain,
                      "overwrite was not refused");
    options.force = true;
    criterion.require(cmd_reproduce(options, out, err) == kExitOk);
    criterion.require(slurp(base / "a" / "table3.csv") == slurp(base / "b" / "table3.csv"));
    fs::remove_all(base);
}

TEST_CASE("criterion 8: robustness under 20% wireless loss") {
    Criterion criterion{8, "lossy runs abort cleanly, accounting intact"};
    Scenario sc = canonical();
    sc.links[0].loss_probability = Rat::of(1, 5);
    int aborted_sessions = 0, missing_nodes = 0;
    for (std::uint64_t run = 0; run < 100; ++run) {
        RunResult result;
        try {
            result = run_simulation(sc, derive_run_seed(8, 0, run));
        } catch (const std::exception& e) {
            criterion.require(false, std::string("run crashed: ") + e.what());
            break;
        }
        std::set<SessionId> completed, aborted;
        std::set<NodeIndex> derived, fired;
        for (const Record& record : result.log.records()) {
            if (record.kind == RecordKind::SessionComplete) completed.insert(*record.session);
            if (record.kind == RecordKind::Aborted && record.session)
                aborted.insert(*record.session);
            if (record.kind == RecordKind::Derived) derived.insert(record.node);
            if (record.kind == RecordKind::Fire) fired.insert(record.node);
        }
        aborted_sessions += static_cast<int>(aborted.size());
        // Each session either completed with the 5-message exchange intact or
        // aborted without exceeding it.
        const TraceCounts counts = count_sends(result.log);
        for (const auto& [session, total] : counts.protocol_sends_by_session) {
            criterion.require(total <= 5, "more than five protocol messages");
            if (completed.count(session) && !aborted.count(session))
                criterion.require(total == 5, "completed session lost messages");
        }
        // Unsynced nodes never fire, and everyone else is in the miss list.
        for (const NodeIndex node : fired)
            criterion.require(derived.count(node) || node == *sc.master,
                              "an unsynchronized node fired");
        const FireReport report = observe_fires(sc, result.log);
        missing_nodes += static_cast<int>(report.never_fired.size());
        std::set<NodeIndex> accounted(fired.begin(), fired.end());
        for (const NodeIndex node : report.never_fired) {
            criterion.require(!accounted.count(node), "a fired node is in the miss list");
            accounted.insert(node);
        }
        for (const EdgeSpec& edge : sc.edges)
            criterion.require(accounted.count(edge.child),
                              "a slave is neither fired nor in the miss list");
    }
    criterion.require(aborted_sessions > 0, "loss never aborted a session across 100 runs");
    criterion.require(missing_nodes > 0, "loss never produced a miss across 100 runs");
}
