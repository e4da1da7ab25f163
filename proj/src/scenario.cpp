#include "syncfire/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace syncfire {

std::optional<NodeIndex> Scenario::node_index(const std::string& name) const {
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].name == name) return static_cast<NodeIndex>(i);
    return std::nullopt;
}

std::vector<std::string> Scenario::node_names() const {
    std::vector<std::string> names;
    names.reserve(nodes.size());
    for (const auto& node : nodes) names.push_back(node.name);
    return names;
}

namespace {

struct Line {
    int number;
    std::vector<std::string> tokens;
};

std::vector<Line> tokenize(const std::string& text) {
    std::vector<Line> lines;
    std::istringstream in(text);
    std::string raw;
    int number = 0;
    while (std::getline(in, raw)) {
        ++number;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        std::istringstream ls(raw);
        Line line{number, {}};
        std::string token;
        while (ls >> token) line.tokens.push_back(token);
        if (!line.tokens.empty()) lines.push_back(std::move(line));
    }
    return lines;
}

[[noreturn]] void fail(int line, const std::string& what) {
    throw ParseError("line " + std::to_string(line) + ": " + what);
}

std::int64_t parse_dur(const Line& line, const std::string& token) {
    try {
        return parse_duration_ns(token);
    } catch (const ParseError& e) {
        fail(line.number, e.what());
    }
}

bool parse_bool(const Line& line, const std::string& token) {
    if (token == "true") return true;
    if (token == "false") return false;
    fail(line.number, "expected true/false, got '" + token + "'");
}

// "2ms..2.5ms" or a single duration.
std::pair<std::int64_t, std::int64_t> parse_delay_range(const Line& line, const std::string& token) {
    const auto dots = token.find("..");
    if (dots == std::string::npos) {
        const std::int64_t d = parse_dur(line, token);
        return {d, d};
    }
    return {parse_dur(line, token.substr(0, dots)), parse_dur(line, token.substr(dots + 2))};
}

void parse_experiment_entry(Scenario& sc, const Line& line) {
    const auto& t = line.tokens;
    const std::string& key = t[0];
    const auto need = [&](std::size_t n) {
        if (t.size() < n + 1) fail(line.number, "'" + key + "' expects a value");
    };
    if (key == "seed") {
        need(1);
        try {
            sc.seed = std::stoull(t[1]);
        } catch (const std::exception&) {
            fail(line.number, "bad seed '" + t[1] + "'");
        }
    } else if (key == "repetitions") {
        need(1);
        try {
            sc.repetitions = std::stoi(t[1]);
        } catch (const std::exception&) {
            fail(line.number, "bad repetition count '" + t[1] + "'");
        }
    } else if (key == "sync_at") {
        need(1);
        sc.sync_at_ns = parse_dur(line, t[1]);
    } else if (key == "start_at") {
        need(1);
        sc.start_at_ns = parse_dur(line, t[1]);
    } else if (key == "sync_gap") {
        need(1);
        sc.sync_gap_ticks = parse_dur(line, t[1]);
    } else if (key == "processing_delay") {
        need(1);
        sc.processing_delay_ticks = parse_dur(line, t[1]);
    } else if (key == "reply_timeout") {
        need(1);
        sc.reply_timeout_ticks = parse_dur(line, t[1]);
    } else if (key == "horizon") {
        need(1);
        sc.horizon_ns = parse_dur(line, t[1]);
    } else if (key == "master_fires") {
        need(1);
        sc.master_fires = parse_bool(line, t[1]);
    } else if (key == "intervals") {
        need(1);
        sc.start_intervals_ticks.clear();
        // either "A..B step C" or an explicit list
        if (t.size() == 4 && t[2] == "step") {
            const auto [lo, hi] = parse_delay_range(line, t[1]);
            const std::int64_t stepv = parse_dur(line, t[3]);
            if (stepv <= 0 || hi < lo) fail(line.number, "bad interval sweep");
            for (std::int64_t v = lo; v <= hi; v += stepv) sc.start_intervals_ticks.push_back(v);
        } else {
            for (std::size_t i = 1; i < t.size(); ++i)
                sc.start_intervals_ticks.push_back(parse_dur(line, t[i]));
        }
    } else {
        fail(line.number, "unknown experiment key '" + key + "'");
    }
}

void parse_node_entry(Scenario& sc, const Line& line) {
    const auto& t = line.tokens;
    NodeSpec node;
    node.name = t[0];
    if (t.size() == 2) {
        try {
            node.clock = clock_preset(t[1]);
        } catch (const ConfigError& e) {
            fail(line.number, e.what());
        }
    } else {
        // inline clock parameters as key/value pairs; settable timers default
        // to microsecond granularity unless the spec says otherwise
        node.clock.timer_resolution_ns = 1000;
        for (std::size_t i = 1; i + 1 < t.size(); i += 2) {
            const std::string& key = t[i];
            const std::string& val = t[i + 1];
            try {
                if (key == "drift_ppm")
                    node.clock.drift_factor = Rat(1) + Rat::parse(val) / Rat(1'000'000);
                else if (key == "drift")
                    node.clock.drift_factor = Rat::parse(val);
                else if (key == "jitter_ppm")
                    node.clock.jitter_bound_ppm = std::stoll(val);
                else if (key == "resolution")
                    node.clock.timer_resolution_ns = parse_duration_ns(val);
                else
                    fail(line.number, "unknown clock key '" + key + "'");
            } catch (const ParseError&) {
                throw;
            } catch (const std::exception&) {
                fail(line.number, "bad value for '" + key + "'");
            }
        }
        if (t.size() % 2 == 0) fail(line.number, "dangling clock key '" + t.back() + "'");
    }
    node.clock.rng_stream = "jitter/" + node.name;
    sc.nodes.push_back(std::move(node));
}

void parse_link_entry(Scenario& sc, const Line& line,
                      std::vector<std::pair<std::size_t, std::vector<std::string>>>& member_names) {
    const auto& t = line.tokens;
    if (t.size() < 3) fail(line.number, "link needs: <name> wireless|wired members ...");
    LinkModel link;
    link.name = t[0];
    if (t[1] == "wireless")
        link.kind = LinkKind::WirelessBroadcast;
    else if (t[1] == "wired")
        link.kind = LinkKind::WiredPointToPoint;
    else
        fail(line.number, "link kind must be wireless or wired, got '" + t[1] + "'");
    std::vector<std::string> members;
    std::size_t i = 2;
    if (t[i] != "members") fail(line.number, "expected 'members'");
    for (++i; i < t.size(); ++i) {
        const std::string& token = t[i];
        if (token == "delay" || token == "loss" || token == "reverse") break;
        members.push_back(token);
    }
    bool saw_delay = false;
    for (; i < t.size(); i += 2) {
        if (i + 1 >= t.size()) fail(line.number, "'" + t[i] + "' expects a value");
        const std::string& key = t[i];
        const std::string& val = t[i + 1];
        if (key == "delay") {
            std::tie(link.delay_min_ns, link.delay_max_ns) = parse_delay_range(line, val);
            saw_delay = true;
        } else if (key == "reverse") {
            link.reverse_delay_ns = parse_dur(line, val);
        } else if (key == "loss") {
            try {
                link.loss_probability = Rat::parse(val);
            } catch (const ArithmeticError&) {
                fail(line.number, "bad loss probability '" + val + "'");
            }
        } else {
            fail(line.number, "unknown link key '" + key + "'");
        }
    }
    if (!saw_delay) fail(line.number, "link '" + link.name + "' has no delay");
    member_names.emplace_back(sc.links.size(), std::move(members));
    sc.links.push_back(std::move(link));
}

void parse_hierarchy_entry(const Line& line,
                           std::vector<std::tuple<int, std::string, std::string, std::string, bool>>& raw_edges,
                           std::optional<std::pair<int, std::string>>& master_name) {
    const auto& t = line.tokens;
    const bool is_edge = t.size() >= 2 && t[1] == "->";
    if (!is_edge) {
        if (t[0] != "master" || t.size() != 2)
            fail(line.number, "usage: 'master <node>' or '<parent> -> <child> via <link> [active]'");
        master_name = {line.number, t[1]};
        return;
    }
    if (t.size() < 5 || t[3] != "via")
        fail(line.number, "usage: <parent> -> <child> via <link> [active]");
    bool active = false;
    if (t.size() == 6) {
        if (t[5] != "active") fail(line.number, "unexpected token '" + t[5] + "'");
        active = true;
    } else if (t.size() > 6) {
        fail(line.number, "too many tokens");
    }
    raw_edges.emplace_back(line.number, t[0], t[2], t[4], active);
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
    Scenario sc;
    const std::vector<Line> lines = tokenize(text);
    std::vector<std::pair<std::size_t, std::vector<std::string>>> link_members;
    std::vector<std::tuple<int, std::string, std::string, std::string, bool>> raw_edges;
    std::optional<std::pair<int, std::string>> master_name;

    std::string section;
    for (const auto& line : lines) {
        const auto& t = line.tokens;
        if (section.empty()) {
            if (t.size() == 2 && t[1] == "{") {
                section = t[0];
                if (section != "experiment" && section != "nodes" && section != "links" &&
                    section != "hierarchy")
                    fail(line.number, "unknown section '" + section + "'");
                continue;
            }
            fail(line.number, "expected a section header ('name {')");
        }
        if (t.size() == 1 && t[0] == "}") {
            section.clear();
            continue;
        }
        if (section == "experiment")
            parse_experiment_entry(sc, line);
        else if (section == "nodes")
            parse_node_entry(sc, line);
        else if (section == "links")
            parse_link_entry(sc, line, link_members);
        else
            parse_hierarchy_entry(line, raw_edges, master_name);
    }
    if (!section.empty())
        throw ParseError("unterminated section '" + section + "' (missing '}')");

    // Resolve names to indices.
    for (auto& [link_idx, names] : link_members) {
        for (const auto& name : names) {
            const auto idx = sc.node_index(name);
            if (!idx)
                throw ParseError("link '" + sc.links[link_idx].name + "' references unknown node '" +
                                 name + "'");
            sc.links[link_idx].endpoints.push_back(*idx);
        }
    }
    if (master_name) {
        const auto idx = sc.node_index(master_name->second);
        if (!idx)
            fail(master_name->first, "master references unknown node '" + master_name->second + "'");
        sc.master = *idx;
    }
    for (const auto& [line_no, parent, child, via, active] : raw_edges) {
        EdgeSpec edge;
        const auto p = sc.node_index(parent);
        const auto c = sc.node_index(child);
        if (!p) fail(line_no, "unknown node '" + parent + "'");
        if (!c) fail(line_no, "unknown node '" + child + "'");
        edge.parent = *p;
        edge.child = *c;
        edge.active = active;
        bool found = false;
        for (std::size_t i = 0; i < sc.links.size(); ++i) {
            if (sc.links[i].name == via) {
                edge.via_link = i;
                found = true;
                break;
            }
        }
        if (!found) fail(line_no, "unknown link '" + via + "'");
        sc.edges.push_back(edge);
    }
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str());
}

std::vector<std::string> validate_scenario(Scenario& sc) {
    std::vector<std::string> violations;
    const auto violate = [&](const std::string& what) { violations.push_back(what); };
    const auto name_of = [&](NodeIndex node) { return sc.nodes[node].name; };

    if (sc.nodes.empty()) {
        if (!sc.links.empty() || !sc.edges.empty()) violate("links/hierarchy without nodes");
        return violations;  // an empty scenario is a valid no-op
    }

    std::set<std::string> seen_names;
    for (const auto& node : sc.nodes) {
        if (!seen_names.insert(node.name).second) violate("duplicate node name '" + node.name + "'");
        const Rat& drift = node.clock.drift_factor;
        if (drift <= Rat::of(9, 10) || drift >= Rat::of(11, 10))
            violate("node '" + node.name + "': drift factor " + drift.str() +
                    " outside the supported (0.9, 1.1) range");
        if (node.clock.jitter_bound_ppm < 0) violate("node '" + node.name + "': negative jitter");
        if (node.clock.timer_resolution_ns < 1)
            violate("node '" + node.name + "': timer resolution must be >= 1 ns");
    }

    std::set<std::string> link_names;
    for (const auto& link : sc.links) {
        if (!link_names.insert(link.name).second) violate("duplicate link name '" + link.name + "'");
        std::set<NodeIndex> members(link.endpoints.begin(), link.endpoints.end());
        if (members.size() != link.endpoints.size())
            violate("link '" + link.name + "': repeated member");
        if (link.kind == LinkKind::WiredPointToPoint) {
            if (link.endpoints.size() != 2)
                violate("wired link '" + link.name + "' must connect exactly 2 nodes");
            if (!link.loss_probability.is_zero())
                violate("wired link '" + link.name + "' cannot lose messages");
            if (link.delay_min_ns != link.delay_max_ns)
                violate("wired link '" + link.name + "' must have a constant delay");
        } else {
            if (link.endpoints.size() < 2)
                violate("wireless link '" + link.name + "' needs at least 2 members");
            if (link.reverse_delay_ns)
                violate("link '" + link.name + "': reverse delay is wired-only");
            if (link.loss_probability.is_negative() || link.loss_probability > Rat(1))
                violate("link '" + link.name + "': loss probability outside [0, 1]");
        }
        if (link.delay_min_ns < 0 || link.delay_max_ns < link.delay_min_ns)
            violate("link '" + link.name + "': bad delay range");
    }

    if (!sc.master) {
        violate("no master defined");
        return violations;
    }

    // Parent/children relations.
    std::map<NodeIndex, std::vector<std::size_t>> children_of;  // edge indices
    std::map<NodeIndex, std::size_t> parent_edge;
    for (std::size_t e = 0; e < sc.edges.size(); ++e) {
        const EdgeSpec& edge = sc.edges[e];
        const LinkModel& via = sc.links[edge.via_link];
        if (!via.has_endpoint(edge.parent) || !via.has_endpoint(edge.child))
            violate("edge " + name_of(edge.parent) + " -> " + name_of(edge.child) + ": link '" +
                    via.name + "' does not connect both nodes");
        if (edge.child == *sc.master) violate("master '" + name_of(edge.child) + "' cannot have a parent");
        if (parent_edge.count(edge.child))
            violate("node '" + name_of(edge.child) + "' has more than one parent");
        else
            parent_edge[edge.child] = e;
        children_of[edge.parent].push_back(e);
    }

    // Reachability from the master (also catches cycles detached from it).
    std::set<NodeIndex> reachable{*sc.master};
    std::vector<NodeIndex> frontier{*sc.master};
    while (!frontier.empty()) {
        const NodeIndex at = frontier.back();
        frontier.pop_back();
        const auto kids = children_of.find(at);
        if (kids == children_of.end()) continue;
        for (const std::size_t e : kids->second) {
            const NodeIndex child = sc.edges[e].child;
            if (reachable.insert(child).second) frontier.push_back(child);
        }
    }
    for (NodeIndex n = 0; n < sc.nodes.size(); ++n)
        if (!reachable.count(n))
            violate("orphan node '" + name_of(n) + "': not reachable from the master");

    // Exactly one active child per hop; designate the lowest-named child when
    // the scenario leaves the choice open.
    for (auto& [parent, edge_indices] : children_of) {
        if (edge_indices.empty()) continue;
        std::vector<std::size_t> actives;
        for (const std::size_t e : edge_indices)
            if (sc.edges[e].active) actives.push_back(e);
        if (actives.size() > 1) {
            violate("node '" + name_of(parent) + "' designates more than one active slave");
            continue;
        }
        if (actives.empty()) {
            const auto lowest = *std::min_element(
                edge_indices.begin(), edge_indices.end(), [&](std::size_t a, std::size_t b) {
                    return name_of(sc.edges[a].child) < name_of(sc.edges[b].child);
                });
            sc.edges[lowest].active = true;
            actives.push_back(lowest);
        }
        // Every passive sibling must hear the active slave's Share broadcast.
        const EdgeSpec& active_edge = sc.edges[actives[0]];
        const LinkModel& share_link = sc.links[active_edge.via_link];
        for (const std::size_t e : edge_indices) {
            const EdgeSpec& edge = sc.edges[e];
            if (edge.active) continue;
            if (!share_link.has_endpoint(edge.child))
                violate("passive slave '" + name_of(edge.child) +
                        "' cannot overhear the active slave '" + name_of(active_edge.child) +
                        "' (not on link '" + share_link.name + "')");
            if (sc.links[edge.via_link].kind != LinkKind::WirelessBroadcast)
                violate("passive slave '" + name_of(edge.child) +
                        "' must listen on a wireless link");
        }
    }

    // Experiment parameters.
    if (sc.sync_gap_ticks <= 0) violate("sync_gap must be positive");
    if (sc.processing_delay_ticks < 0) violate("processing_delay cannot be negative");
    if (sc.sync_at_ns < 0) violate("sync_at cannot be negative");
    if (sc.start_at_ns && *sc.start_at_ns < 0) violate("start_at cannot be negative");
    if (sc.horizon_ns && *sc.horizon_ns <= 0) violate("horizon must be positive");
    if (sc.repetitions < 1) violate("repetitions must be >= 1");
    if (sc.reply_timeout_ticks && *sc.reply_timeout_ticks <= 0) violate("reply_timeout must be positive");
    for (const std::int64_t interval : sc.start_intervals_ticks)
        if (interval <= 0) violate("start interval must be positive");
    if (!sc.start_intervals_ticks.empty() && !sc.start_at_ns)
        violate("start_at is required when intervals are configured");
    for (const auto& [parent, edge_indices] : children_of) {
        (void)edge_indices;
        if (sc.sync_gap_ticks < sc.nodes[parent].clock.timer_resolution_ns)
            violate("sync_gap is below node '" + name_of(parent) + "' timer resolution");
    }
    return violations;
}

}  // namespace syncfire
