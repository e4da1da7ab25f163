#include "syncfire/simulator.hpp"

#include "syncfire/protocol.hpp"

#include <algorithm>
#include <optional>
#include <queue>
#include <set>
#include <variant>

namespace syncfire {

namespace {

struct ArrivalEv {
    SyncMessage msg;
};
struct TimerEv {
    TimerKind kind;
    std::uint32_t generation;
    Rat deadline_ticks;
};
struct TriggerSyncEv {};
struct TriggerStartEv {
    Rat interval_ticks;
};

struct Event {
    Rat t;
    std::uint64_t seq;
    NodeIndex node;
    std::variant<ArrivalEv, TimerEv, TriggerSyncEv, TriggerStartEv> payload;
};

struct EventAfter {
    bool operator()(const Event& a, const Event& b) const {
        if (a.t != b.t) return a.t > b.t;
        return a.seq > b.seq;
    }
};

struct EngineNode {
    NodeBehavior behavior;
    SyncState state;
    NodeClock clock;
    std::string jitter_stream;
};

std::int64_t ceil_to_multiple(std::int64_t value, std::int64_t grain) {
    if (grain <= 1) return value;
    return (value + grain - 1) / grain * grain;
}

class Engine {
public:
    Engine(const Scenario& sc, std::uint64_t run_seed) : sc_(sc), streams_(run_seed) {
        build_nodes();
        if (sc_.master) {
            if (!nodes_[*sc_.master].behavior.children.empty())
                schedule({Rat(sc_.sync_at_ns), 0, *sc_.master, TriggerSyncEv{}});
            if (sc_.start_at_ns && !sc_.start_intervals_ticks.empty())
                schedule({Rat(*sc_.start_at_ns), 0, *sc_.master,
                          TriggerStartEv{Rat(sc_.start_intervals_ticks.front())}});
        }
        horizon_ = Rat(sc_.horizon_ns ? *sc_.horizon_ns
                                      : sc_.start_at_ns.value_or(sc_.sync_at_ns) +
                                            max_interval() + 10'000'000'000LL);
    }

    RunResult run() {
        RunResult result;
        while (!queue_.empty() && queue_.top().t <= horizon_) {
            const Event ev = queue_.top();
            queue_.pop();
            if (ev.t < now_) throw ArithmeticError("event queue ran backwards");
            now_ = ev.t;
            dispatch(ev);
        }
        if (!queue_.empty()) {
            bool task_pending = false;
            std::size_t pending = 0;
            while (!queue_.empty()) {
                const Event& ev = queue_.top();
                if (const auto* timer = std::get_if<TimerEv>(&ev.payload))
                    task_pending |= timer->kind == TimerKind::TaskFire;
                ++pending;
                queue_.pop();
            }
            Record record;
            record.t_exact = horizon_;
            record.node = sc_.master.value_or(0);
            record.kind = RecordKind::Incomplete;
            record.reason = std::to_string(pending) + " pending event(s)" +
                            (task_pending ? ", including a task timer" : "");
            log_.append(record);
            result.complete = false;
        }
        result.log = std::move(log_);
        return result;
    }

private:
    void build_nodes() {
        nodes_.resize(sc_.nodes.size());
        downlinks_.resize(sc_.nodes.size());
        uplink_.assign(sc_.nodes.size(), std::nullopt);
        for (NodeIndex n = 0; n < nodes_.size(); ++n) {
            EngineNode& node = nodes_[n];
            node.behavior.self = n;
            node.state.self = n;
            node.clock = NodeClock(sc_.nodes[n].clock);
            node.jitter_stream = sc_.nodes[n].clock.rng_stream.empty()
                                     ? "jitter/" + sc_.nodes[n].name
                                     : sc_.nodes[n].clock.rng_stream;
        }
        for (const EdgeSpec& edge : sc_.edges) {
            EngineNode& parent = nodes_[edge.parent];
            parent.behavior.children.push_back(edge.child);
            if (edge.active) parent.behavior.active_child = edge.child;
            nodes_[edge.child].behavior.parent = edge.parent;
            nodes_[edge.child].behavior.designated_active = edge.active;
            uplink_[edge.child] = edge.via_link;
            auto& down = downlinks_[edge.parent];
            if (std::find(down.begin(), down.end(), edge.via_link) == down.end())
                down.push_back(edge.via_link);
        }
        for (NodeIndex n = 0; n < nodes_.size(); ++n) {
            NodeBehavior& b = nodes_[n].behavior;
            const ClockModel& clock = sc_.nodes[n].clock;
            b.mark_gap_ticks = sc_.sync_gap_ticks;
            b.processing_delay_ticks = sc_.processing_delay_ticks;
            b.timer_resolution_ns = clock.timer_resolution_ns;
            b.fires = sc_.master && n == *sc_.master ? sc_.master_fires : true;
            std::int64_t worst_delay = 0;
            for (const std::size_t l : downlinks_[n])
                worst_delay = std::max(worst_delay, sc_.links[l].delay_max_ns);
            if (uplink_[n]) {
                const LinkModel& up = sc_.links[*uplink_[n]];
                worst_delay = std::max(
                    {worst_delay, up.delay_max_ns, up.reverse_delay_ns.value_or(up.delay_max_ns)});
            }
            const std::int64_t auto_timeout =
                10 * (2 * worst_delay + sc_.processing_delay_ticks);
            b.reply_timeout_ticks = ceil_to_multiple(
                std::max(sc_.reply_timeout_ticks.value_or(auto_timeout),
                         2 * b.timer_resolution_ns),
                b.timer_resolution_ns);
            b.session_timeout_ticks =
                ceil_to_multiple(sc_.sync_gap_ticks + 2 * b.reply_timeout_ticks,
                                 b.timer_resolution_ns);
        }
    }

    std::int64_t max_interval() const {
        std::int64_t max = 0;
        for (const std::int64_t v : sc_.start_intervals_ticks) max = std::max(max, v);
        return max;
    }

    void schedule(Event ev) {
        ev.seq = next_seq_++;
        queue_.push(std::move(ev));
    }

    Rng& jitter_of(NodeIndex n) { return streams_.stream(nodes_[n].jitter_stream); }

    void dispatch(const Event& ev) {
        EngineNode& node = nodes_[ev.node];
        std::optional<Input> input;
        Rat reading;
        if (const auto* arrival = std::get_if<ArrivalEv>(&ev.payload)) {
            reading = node.clock.reading_at(ev.t, jitter_of(ev.node));
            Record record;
            record.t_exact = ev.t;
            record.node = ev.node;
            record.kind = RecordKind::Recv;
            record.msg = arrival->msg.kind();
            record.session = arrival->msg.session;
            record.peer = arrival->msg.sender;
            record.local = reading;
            log_.append(record);
            input = MsgArrival{arrival->msg};
        } else if (const auto* timer = std::get_if<TimerEv>(&ev.payload)) {
            // Stale timers (superseded generation) are discarded silently.
            if (node.state.expected_timer_gen[static_cast<std::size_t>(timer->kind)] !=
                timer->generation)
                return;
            reading = node.clock.reading_at_deadline(ev.t, timer->deadline_ticks);
            Record record;
            record.t_exact = ev.t;
            record.node = ev.node;
            record.kind = RecordKind::Timer;
            record.local = reading;
            record.reason = to_string(timer->kind);
            log_.append(record);
            input = TimerFired{timer->kind, timer->generation};
        } else if (std::holds_alternative<TriggerSyncEv>(ev.payload)) {
            reading = node.clock.reading_at(ev.t, jitter_of(ev.node));
            input = BeginSession{};
        } else {
            const auto& trigger = std::get<TriggerStartEv>(ev.payload);
            reading = node.clock.reading_at(ev.t, jitter_of(ev.node));
            input = IssueStart{trigger.interval_ticks};
        }
        const Ticks now(ev.node, reading);
        const auto actions = step(node.state, node.behavior, *input, now);
        perform(ev.node, ev.t, reading, actions);
    }

    void perform(NodeIndex n, const Rat& t, const Rat& reading,
                 const std::vector<Action>& actions) {
        for (const Action& action : actions) {
            if (const auto* send = std::get_if<SendMsg>(&action)) {
                transmit(n, t, reading, send->msg);
            } else if (const auto* arm = std::get_if<ArmTimer>(&action)) {
                const ClockModel& model = nodes_[n].clock.model();
                const Rat duration = model.true_duration_of_timer(arm->delay_ticks, jitter_of(n));
                const Rat deadline = reading + model.quantize_ticks(arm->delay_ticks);
                Record record;
                record.t_exact = t;
                record.node = n;
                record.kind = RecordKind::Arm;
                record.local = deadline;
                record.value = arm->delay_ticks;
                record.reason = to_string(arm->kind);
                log_.append(record);
                schedule({t + duration, 0, n, TimerEv{arm->kind, arm->generation, deadline}});
            } else if (std::holds_alternative<TaskFired>(action)) {
                Record record;
                record.t_exact = t;
                record.node = n;
                record.kind = RecordKind::Fire;
                record.local = reading;
                log_.append(record);
            } else if (std::holds_alternative<StartRelay>(action)) {
                schedule({t, 0, n, TriggerSyncEv{}});
            } else {
                append_note(n, t, reading, std::get<Note>(action));
            }
        }
    }

    void transmit(NodeIndex sender, const Rat& t, const Rat& reading, const SyncMessage& msg) {
        if (msg.kind() == MsgKind::Mark1) {
            Record init;
            init.t_exact = t;
            init.node = sender;
            init.kind = RecordKind::SessionInit;
            init.session = msg.session;
            init.local = reading;
            log_.append(init);
        }
        Record record;
        record.t_exact = t;
        record.node = sender;
        record.kind = RecordKind::Send;
        record.msg = msg.kind();
        record.session = msg.session;
        record.local = reading;
        log_.append(record);
        for (const std::size_t link_index : route_links(sc_, sender, msg.kind())) {
            const DeliveryPlan plan = deliver(sc_.links[link_index], sender, t, streams_);
            for (const Delivery& delivery : plan.deliveries)
                schedule({delivery.arrival_ns, 0, delivery.receiver, ArrivalEv{msg}});
            for (const NodeIndex lost : plan.losses) {
                Record loss;
                loss.t_exact = t;
                loss.node = sender;
                loss.kind = RecordKind::Lost;
                loss.msg = msg.kind();
                loss.session = msg.session;
                loss.peer = lost;
                log_.append(loss);
            }
        }
    }

    void append_note(NodeIndex n, const Rat& t, const Rat& reading, const Note& note) {
        Record record;
        record.t_exact = t;
        record.node = n;
        record.session = note.session;
        record.local = reading;
        record.reason = note.reason;
        record.value = note.value;
        record.value2 = note.value2;
        switch (note.kind) {
            case NoteKind::Busy: record.kind = RecordKind::Busy; break;
            case NoteKind::Dropped: record.kind = RecordKind::Dropped; break;
            case NoteKind::Ignored: record.kind = RecordKind::Ignored; break;
            case NoteKind::Joined: record.kind = RecordKind::State; break;
            case NoteKind::Aborted: record.kind = RecordKind::Aborted; break;
            case NoteKind::Derived: record.kind = RecordKind::Derived; break;
            case NoteKind::SessionComplete: record.kind = RecordKind::SessionComplete; break;
            case NoteKind::StartIssued: record.kind = RecordKind::StartIssued; break;
            case NoteKind::MissEventPassed:
            case NoteKind::MissUnsynced:
                record.kind = RecordKind::Miss;
                if (record.reason.empty())
                    record.reason = note.kind == NoteKind::MissUnsynced ? "not synchronized"
                                                                        : "event already passed";
                break;
            case NoteKind::ForwardSkipped: record.kind = RecordKind::ForwardSkipped; break;
        }
        log_.append(record);
        // The start signal defines the reference instant every node chases:
        // the sender's own deadline on the ground-truth axis, jitter-free.
        // Carried in `value` (the record itself logs at the issue instant).
        if (note.kind == NoteKind::StartIssued && note.value) {
            const ClockModel& model = nodes_[n].clock.model();
            Record deadline;
            deadline.t_exact = t;
            deadline.node = n;
            deadline.kind = RecordKind::Deadline;
            deadline.session = note.session;
            deadline.local = reading;
            deadline.value = t + model.quantize_ticks(*note.value) / model.drift_factor;
            deadline.value2 = *note.value;
            log_.append(deadline);
        }
    }

    const Scenario& sc_;
    StreamSet streams_;
    EventLog log_;
    std::priority_queue<Event, std::vector<Event>, EventAfter> queue_;
    std::uint64_t next_seq_ = 0;
    std::vector<EngineNode> nodes_;
    std::vector<std::vector<std::size_t>> downlinks_;
    std::vector<std::optional<std::size_t>> uplink_;
    Rat now_;
    Rat horizon_;
};

}  // namespace

std::vector<std::size_t> route_links(const Scenario& scenario, NodeIndex sender, MsgKind kind) {
    std::vector<std::size_t> links;
    if (kind == MsgKind::Reply || kind == MsgKind::Share) {
        for (const EdgeSpec& edge : scenario.edges)
            if (edge.child == sender) {
                links.push_back(edge.via_link);
                break;
            }
        return links;
    }
    for (const EdgeSpec& edge : scenario.edges)
        if (edge.parent == sender &&
            std::find(links.begin(), links.end(), edge.via_link) == links.end())
            links.push_back(edge.via_link);
    return links;
}

RunResult run_simulation(const Scenario& scenario, std::uint64_t run_seed) {
    Scenario checked = scenario;
    const auto violations = validate_scenario(checked);
    if (!violations.empty()) {
        std::string what = "invalid scenario:";
        for (const auto& v : violations) what += "\n  - " + v;
        throw ConfigError(what);
    }
    Engine engine(checked, run_seed);
    return engine.run();
}

FireReport observe_fires(const Scenario& scenario, const EventLog& log) {
    FireReport report;
    std::set<NodeIndex> fired;
    for (const Record& record : log.records()) {
        if (record.kind != RecordKind::Fire) continue;
        report.fired.push_back({record.node, record.time(), record.t_exact});
        fired.insert(record.node);
    }
    std::set<NodeIndex> expected;
    for (const EdgeSpec& edge : scenario.edges) expected.insert(edge.child);
    if (scenario.master && scenario.master_fires) expected.insert(*scenario.master);
    for (const NodeIndex node : expected)
        if (!fired.count(node)) report.never_fired.push_back(node);
    return report;
}

}  // namespace syncfire
