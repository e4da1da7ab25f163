#include "syncfire/protocol.hpp"

#include <utility>

namespace syncfire {

const char* to_string(Role role) {
    switch (role) {
        case Role::Unsynced: return "unsynced";
        case Role::Master: return "master";
        case Role::ActiveSlave: return "active";
        case Role::PassiveSlave: return "passive";
    }
    return "?";
}

const char* to_string(TimerKind kind) {
    switch (kind) {
        case TimerKind::MarkGap: return "mark_gap";
        case TimerKind::ReplyDelay: return "reply_delay";
        case TimerKind::ReplyTimeout: return "reply_timeout";
        case TimerKind::SessionWatchdog: return "session_watchdog";
        case TimerKind::TaskFire: return "task_fire";
    }
    return "?";
}

const char* to_string(NoteKind kind) {
    switch (kind) {
        case NoteKind::Busy: return "busy";
        case NoteKind::Dropped: return "dropped";
        case NoteKind::Ignored: return "ignored";
        case NoteKind::Joined: return "joined";
        case NoteKind::Aborted: return "aborted";
        case NoteKind::Derived: return "derived";
        case NoteKind::SessionComplete: return "session_complete";
        case NoteKind::StartIssued: return "start_issued";
        case NoteKind::MissEventPassed: return "miss_event_passed";
        case NoteKind::MissUnsynced: return "miss_unsynced";
        case NoteKind::ForwardSkipped: return "forward_skipped";
    }
    return "?";
}

Rat compute_drift(const Ticks& parent_interval, const Ticks& local_interval) {
    if (!parent_interval.value().is_positive() || !local_interval.value().is_positive())
        throw ProtocolViolation("drift from non-positive interval (parent " +
                                parent_interval.value().str() + ", local " +
                                local_interval.value().str() + ")");
    return local_interval.value() / parent_interval.value();
}

Rat compute_propagation(const Ticks& roundtrip_parent, const Ticks& turnaround_local,
                        const Rat& drift_ratio) {
    if (!drift_ratio.is_positive()) throw ProtocolViolation("non-positive drift ratio");
    const Rat corrected_turnaround = turnaround_local.value() / drift_ratio;  // in parent ticks
    if (roundtrip_parent.value() < corrected_turnaround)
        throw ProtocolViolation("negative propagation: turnaround exceeds round trip");
    return (roundtrip_parent.value() - corrected_turnaround) / Rat(2);
}

Rat compute_wait(const Rat& interval_parent, const Rat& propagation_parent,
                 const Rat& drift_ratio) {
    if (interval_parent <= propagation_parent)
        throw EventAlreadyPassed("event already passed: interval " + interval_parent.str() +
                                 " <= propagation " + propagation_parent.str());
    return (interval_parent - propagation_parent) * drift_ratio;
}

namespace {

std::size_t idx(TimerKind kind) { return static_cast<std::size_t>(kind); }

Rat quantize(const Rat& ticks, std::int64_t resolution_ns) {
    if (resolution_ns <= 1) return ticks;
    const Rat res(resolution_ns);
    return Rat((ticks / res).floor(), 1) * res;
}

struct Stepper {
    SyncState& st;
    const NodeBehavior& cfg;
    const Ticks& now;
    std::vector<Action> out;

    void emit_note(NoteKind kind, std::optional<SessionId> sid = std::nullopt,
                   std::string reason = {}, std::optional<Rat> value = std::nullopt,
                   std::optional<Rat> value2 = std::nullopt) {
        out.push_back(Note{kind, sid, std::move(reason), std::move(value), std::move(value2)});
    }

    void arm(TimerKind kind, Rat delay_ticks) {
        const std::uint32_t gen = ++st.timer_gen_counter;
        st.expected_timer_gen[idx(kind)] = gen;
        out.push_back(ArmTimer{kind, gen, std::move(delay_ticks)});
    }

    void cancel(TimerKind kind) { st.expected_timer_gen[idx(kind)] = 0; }

    void close_slot() {
        st.session.reset();
        cancel(TimerKind::MarkGap);
        cancel(TimerKind::ReplyDelay);
        cancel(TimerKind::ReplyTimeout);
        cancel(TimerKind::SessionWatchdog);
    }

    void abort_session(const std::string& reason) {
        const SessionId sid = st.session->id;
        close_slot();
        emit_note(NoteKind::Aborted, sid, reason);
    }

    void send(SessionId sid, std::variant<Mark1, Mark2, Reply, Report, Share, StartMsg> body) {
        out.push_back(SendMsg{SyncMessage{sid, cfg.self, std::move(body)}});
    }

    bool in_session(const SessionId& sid) const { return st.session && st.session->id == sid; }

    SessionId start_session_id() {
        if (st.last_initiated) return *st.last_initiated;
        const SessionId sid{cfg.self, st.next_session_seq++};
        st.last_initiated = sid;
        return sid;
    }

    // Completion of this node's own synchronization: derived values are in
    // place; relays immediately synchronize their own children.
    void complete_own_sync(SessionId sid, Rat drift, Rat prop) {
        st.drift_ratio = drift;
        st.propagation = prop;
        st.sync_complete = true;
        emit_note(NoteKind::Derived, sid, {}, std::move(drift), std::move(prop));
        close_slot();
        emit_note(NoteKind::SessionComplete, sid);
        if (!cfg.children.empty()) out.push_back(StartRelay{});
    }

    // --- inputs ---

    void on_begin_session() {
        if (cfg.children.empty()) return;  // nothing to synchronize
        if (st.session) {
            emit_note(NoteKind::Busy, st.session->id, "session already in progress");
            return;
        }
        SessionSlot slot;
        slot.id = SessionId{cfg.self, st.next_session_seq++};
        slot.role = Role::Master;
        slot.mark1_sent_at = now.value();
        st.session = slot;
        st.last_initiated = slot.id;
        send(slot.id, Mark1{});
        arm(TimerKind::MarkGap, quantize(Rat(cfg.mark_gap_ticks), cfg.timer_resolution_ns));
    }

    void on_timer(const TimerFired& timer) {
        auto& expected = st.expected_timer_gen[idx(timer.kind)];
        if (timer.generation == 0 || timer.generation != expected) return;  // stale
        expected = 0;
        switch (timer.kind) {
            case TimerKind::MarkGap: {
                if (!st.session || st.session->role != Role::Master) return;
                st.session->mark2_sent_at = now.value();
                send(st.session->id, Mark2{});
                arm(TimerKind::ReplyTimeout,
                    quantize(Rat(cfg.reply_timeout_ticks), cfg.timer_resolution_ns));
                break;
            }
            case TimerKind::ReplyDelay: {
                if (!st.session || st.session->role != Role::ActiveSlave) return;
                st.session->reply_sent_at = now.value();
                send(st.session->id, Reply{});
                break;
            }
            case TimerKind::ReplyTimeout: {
                if (st.session && st.session->role == Role::Master && !st.session->reply_recv_at)
                    abort_session("no reply from active slave");
                break;
            }
            case TimerKind::SessionWatchdog: {
                if (!st.session) return;
                // The initiator cannot tell a lost Share from one never sent;
                // without confirmation the session is recorded as aborted.
                abort_session(st.session->role == Role::Master && st.session->reply_recv_at
                                  ? "share not observed"
                                  : "session watchdog expired");
                break;
            }
            case TimerKind::TaskFire: {
                if (st.fired || !st.armed_fire) return;
                st.fired = true;
                out.push_back(TaskFired{});
                break;
            }
        }
    }

    // Unknown-session traffic: count it as ours-but-unusable (dropped) when it
    // belongs to our hop or to a session we initiated, otherwise as overheard
    // foreign traffic (ignored).
    void count_unusable(const SyncMessage& msg) {
        const bool ours = msg.session.initiator == cfg.self ||
                          (cfg.parent && msg.session.initiator == *cfg.parent);
        if (ours) {
            ++st.dropped;
            emit_note(NoteKind::Dropped, msg.session);
        } else {
            ++st.ignored;
            emit_note(NoteKind::Ignored, msg.session);
        }
    }

    void on_mark1(const SyncMessage& msg) {
        if (!cfg.parent || msg.sender != *cfg.parent) {
            ++st.ignored;
            emit_note(NoteKind::Ignored, msg.session);
            return;
        }
        if (st.session) {
            ++st.dropped;
            emit_note(NoteKind::Dropped, msg.session,
                      in_session(msg.session) ? "duplicate mark1" : "busy with another session");
            return;
        }
        SessionSlot slot;
        slot.id = msg.session;
        slot.role = cfg.designated_active ? Role::ActiveSlave : Role::PassiveSlave;
        slot.mark1_recv_at = now.value();
        st.session = slot;
        emit_note(NoteKind::Joined, msg.session, to_string(slot.role));
        arm(TimerKind::SessionWatchdog,
            quantize(Rat(cfg.session_timeout_ticks), cfg.timer_resolution_ns));
    }

    void on_mark2(const SyncMessage& msg) {
        if (!in_session(msg.session)) {
            count_unusable(msg);
            return;
        }
        SessionSlot& slot = *st.session;
        if (slot.role == Role::ActiveSlave) {
            if (!slot.mark1_recv_at) {
                abort_session("mark2 without mark1");
                return;
            }
            if (slot.mark2_recv_at) {
                ++st.dropped;
                emit_note(NoteKind::Dropped, msg.session, "duplicate mark2");
                return;
            }
            slot.mark2_recv_at = now.value();
            arm(TimerKind::ReplyDelay,
                quantize(Rat(cfg.processing_delay_ticks), cfg.timer_resolution_ns));
        } else if (slot.role == Role::PassiveSlave) {
            if (!slot.mark1_recv_at || slot.mark2_recv_at)
                slot.broken = true;
            else
                slot.mark2_recv_at = now.value();
        }
    }

    void on_reply(const SyncMessage& msg) {
        if (!in_session(msg.session)) {
            count_unusable(msg);
            return;
        }
        SessionSlot& slot = *st.session;
        if (slot.role != Role::Master) return;  // passives overhear the reply; nothing to do
        if (!cfg.active_child || msg.sender != *cfg.active_child || !slot.mark2_sent_at ||
            slot.reply_recv_at) {
            ++st.dropped;
            emit_note(NoteKind::Dropped, msg.session, "unexpected reply");
            return;
        }
        slot.reply_recv_at = now.value();
        cancel(TimerKind::ReplyTimeout);
        const Rat mark_interval = *slot.mark2_sent_at - *slot.mark1_sent_at;
        const Rat roundtrip = *slot.reply_recv_at - *slot.mark2_sent_at;
        send(slot.id, Report{mark_interval, roundtrip});
        // Wait for the active slave's Share before closing the slot.
        arm(TimerKind::SessionWatchdog,
            quantize(Rat(cfg.reply_timeout_ticks), cfg.timer_resolution_ns));
    }

    void on_report(const SyncMessage& msg, const Report& report) {
        if (!in_session(msg.session)) {
            count_unusable(msg);
            return;
        }
        SessionSlot& slot = *st.session;
        const NodeIndex parent = *cfg.parent;
        if (slot.role == Role::ActiveSlave) {
            if (!slot.mark1_recv_at || !slot.mark2_recv_at || !slot.reply_sent_at) {
                abort_session("report before the exchange finished");
                return;
            }
            try {
                const Ticks parent_interval(parent, report.mark_interval);
                const Ticks local_interval(cfg.self, *slot.mark2_recv_at - *slot.mark1_recv_at);
                const Rat drift = compute_drift(parent_interval, local_interval);
                const Ticks roundtrip(parent, report.roundtrip);
                const Ticks turnaround(cfg.self, *slot.reply_sent_at - *slot.mark2_recv_at);
                const Rat prop = compute_propagation(roundtrip, turnaround, drift);
                const SessionId sid = slot.id;
                send(sid, Share{prop});
                complete_own_sync(sid, drift, prop);
            } catch (const ProtocolViolation& violation) {
                abort_session(violation.what());
            }
        } else if (slot.role == Role::PassiveSlave) {
            if (slot.broken || !slot.mark1_recv_at || !slot.mark2_recv_at) {
                slot.broken = true;
                return;
            }
            try {
                const Ticks parent_interval(parent, report.mark_interval);
                const Ticks local_interval(cfg.self, *slot.mark2_recv_at - *slot.mark1_recv_at);
                slot.pending_drift = compute_drift(parent_interval, local_interval);
            } catch (const ProtocolViolation& violation) {
                abort_session(violation.what());
            }
        }
    }

    void on_share(const SyncMessage& msg, const Share& share) {
        if (!in_session(msg.session)) {
            count_unusable(msg);
            return;
        }
        SessionSlot& slot = *st.session;
        if (slot.role == Role::Master) {
            const SessionId sid = slot.id;
            close_slot();
            emit_note(NoteKind::SessionComplete, sid);
            return;
        }
        if (slot.role != Role::PassiveSlave) return;
        if (slot.broken || !slot.pending_drift) {
            abort_session("incomplete passive synchronization");
            return;
        }
        complete_own_sync(slot.id, *slot.pending_drift, share.propagation);
    }

    void on_start_msg(const SyncMessage& msg, const StartMsg& start) {
        if (!cfg.parent || msg.sender != *cfg.parent) {
            ++st.ignored;
            emit_note(NoteKind::Ignored, msg.session);
            return;
        }
        if (st.armed_fire || st.fired) {
            ++st.dropped;
            emit_note(NoteKind::Dropped, msg.session, "duplicate start");
            return;
        }
        if (!st.sync_complete || !st.drift_ratio || !st.propagation) {
            emit_note(NoteKind::MissUnsynced, msg.session);
            return;
        }
        Rat wait;
        try {
            wait = compute_wait(start.interval, *st.propagation, *st.drift_ratio);
        } catch (const EventAlreadyPassed& e) {
            emit_note(NoteKind::MissEventPassed, msg.session, e.what());
            return;
        }
        const Rat wait_q = quantize(wait, cfg.timer_resolution_ns);
        st.armed_fire = now.value() + wait_q;
        arm(TimerKind::TaskFire, wait_q);
        forward_start();
    }

    void on_issue_start(const IssueStart& issue) {
        const SessionId sid = start_session_id();
        if (!issue.interval_ticks.is_positive()) {
            emit_note(NoteKind::MissEventPassed, sid, "non-positive start interval");
            return;
        }
        emit_note(NoteKind::StartIssued, sid, {}, issue.interval_ticks);
        send(sid, StartMsg{issue.interval_ticks});
        if (cfg.fires) {
            const Rat wait_q = quantize(issue.interval_ticks, cfg.timer_resolution_ns);
            st.armed_fire = now.value() + wait_q;
            arm(TimerKind::TaskFire, wait_q);
        }
    }

    // Re-base the countdown onto this node's own clock at the moment of
    // transmission: the children chase this node's armed deadline.
    void forward_start() {
        if (cfg.children.empty()) return;
        const Rat remaining = *st.armed_fire - now.value();
        if (remaining.is_negative()) {
            emit_note(NoteKind::ForwardSkipped, st.last_initiated, "deadline already passed");
            return;
        }
        send(start_session_id(), StartMsg{remaining});
    }

    void on_message(const MsgArrival& arrival) {
        const SyncMessage& msg = arrival.msg;
        switch (msg.kind()) {
            case MsgKind::Mark1: on_mark1(msg); break;
            case MsgKind::Mark2: on_mark2(msg); break;
            case MsgKind::Reply: on_reply(msg); break;
            case MsgKind::Report: on_report(msg, std::get<Report>(msg.body)); break;
            case MsgKind::Share: on_share(msg, std::get<Share>(msg.body)); break;
            case MsgKind::Start: on_start_msg(msg, std::get<StartMsg>(msg.body)); break;
        }
    }
};

}  // namespace

std::vector<Action> step(SyncState& state, const NodeBehavior& behavior, const Input& input,
                         const Ticks& now) {
    if (now.owner() != behavior.self)
        throw ClockDomainError("step: reading from a foreign clock");
    Stepper stepper{state, behavior, now, {}};
    std::visit(
        [&](const auto& in) {
            using T = std::decay_t<decltype(in)>;
            if constexpr (std::is_same_v<T, MsgArrival>)
                stepper.on_message(in);
            else if constexpr (std::is_same_v<T, TimerFired>)
                stepper.on_timer(in);
            else if constexpr (std::is_same_v<T, BeginSession>)
                stepper.on_begin_session();
            else
                stepper.on_issue_start(in);
        },
        input);
    return std::move(stepper.out);
}

}  // namespace syncfire
