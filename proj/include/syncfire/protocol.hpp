#pragma once

#include "syncfire/message.hpp"
#include "syncfire/rational.hpp"
#include "syncfire/ticks.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace syncfire {

/// Raised by the derived-quantity math when a precondition fails; the state
/// machine converts it into a clean session abort (never a crash).
struct ProtocolViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised by compute_wait when the announced interval has already elapsed.
struct EventAlreadyPassed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- derived-quantity math -------------------------------------------------

/// Own ticks per parent tick, from the two measurements of the same true
/// interval. Both inputs must be positive.
Rat compute_drift(const Ticks& parent_interval, const Ticks& local_interval);

/// One-way propagation time in parent ticks: the measured round trip minus
/// the drift-corrected processing window, halved (symmetric-delay
/// assumption). Requires roundtrip * drift >= turnaround.
Rat compute_propagation(const Ticks& roundtrip_parent, const Ticks& turnaround_local,
                        const Rat& drift_ratio);

/// Local countdown for a task announced `interval_parent` parent ticks ahead:
/// propagation subtracted, then rescaled by the drift ratio. Throws
/// EventAlreadyPassed when interval <= propagation.
Rat compute_wait(const Rat& interval_parent, const Rat& propagation_parent,
                 const Rat& drift_ratio);

// --- state machine ----------------------------------------------------------

enum class Role { Unsynced, Master, ActiveSlave, PassiveSlave };

const char* to_string(Role role);

/// Static per-node parameters, assembled from the scenario.
struct NodeBehavior {
    NodeIndex self = 0;
    std::optional<NodeIndex> parent;
    std::vector<NodeIndex> children;       // scenario order
    std::optional<NodeIndex> active_child; // the one child that replies
    bool designated_active = false;        // whether *this* node replies in its parent's hop
    std::int64_t mark_gap_ticks = 0;
    std::int64_t processing_delay_ticks = 0;
    std::int64_t reply_timeout_ticks = 0;    // initiator: Mark2 send -> Reply
    std::int64_t session_timeout_ticks = 0;  // slave watchdog from Mark1
    std::int64_t timer_resolution_ns = 1;
    bool fires = true;  // arm the task timer on Start (master may opt out)
};

enum class TimerKind { MarkGap = 0, ReplyDelay, ReplyTimeout, SessionWatchdog, TaskFire };
inline constexpr std::size_t kTimerKinds = 5;

const char* to_string(TimerKind kind);

/// In-progress participation in one session.
struct SessionSlot {
    SessionId id;
    Role role = Role::Unsynced;
    // initiator side
    std::optional<Rat> mark1_sent_at, mark2_sent_at, reply_recv_at;
    // slave side
    std::optional<Rat> mark1_recv_at, mark2_recv_at, reply_sent_at;
    std::optional<Rat> pending_drift;  // passive: drift known, waiting for Share
    bool broken = false;               // passive that missed a message; will not complete

    bool operator==(const SessionSlot&) const = default;
};

struct SyncState {
    NodeIndex self = 0;
    std::optional<SessionSlot> session;
    std::uint32_t next_session_seq = 0;
    std::optional<SessionId> last_initiated;

    // derived values w.r.t. the parent, set once the node's own sync completed
    std::optional<Rat> drift_ratio;   // own ticks per parent tick
    std::optional<Rat> propagation;   // parent ticks
    bool sync_complete = false;

    std::optional<Rat> armed_fire;  // local-tick deadline of the task timer
    bool fired = false;

    std::array<std::uint32_t, kTimerKinds> expected_timer_gen{};  // 0 = not armed
    std::uint32_t timer_gen_counter = 0;

    std::uint64_t dropped = 0;  // stale/unknown-session messages
    std::uint64_t ignored = 0;  // overheard messages not addressed to this node's hop

    bool operator==(const SyncState&) const = default;
};

// inputs
struct MsgArrival {
    SyncMessage msg;
};
struct TimerFired {
    TimerKind kind;
    std::uint32_t generation;
};
struct BeginSession {};  // initiate synchronization toward the children
struct IssueStart {      // broadcast the start signal now (root trigger)
    Rat interval_ticks;
};
using Input = std::variant<MsgArrival, TimerFired, BeginSession, IssueStart>;

// actions
struct SendMsg {
    SyncMessage msg;
};
struct ArmTimer {
    TimerKind kind;
    std::uint32_t generation;
    Rat delay_ticks;  // already quantized to the node's timer resolution
};
struct TaskFired {};
struct StartRelay {};  // ask the scheduler to run BeginSession on this node now

enum class NoteKind {
    Busy,
    Dropped,
    Ignored,
    Joined,  // role assumed for a session (reason carries the role)
    Aborted,
    Derived,
    SessionComplete,
    StartIssued,
    MissEventPassed,
    MissUnsynced,
    ForwardSkipped,
};

const char* to_string(NoteKind kind);

struct Note {
    NoteKind kind;
    std::optional<SessionId> session;
    std::string reason;
    std::optional<Rat> value;   // Derived: drift ratio; StartIssued: interval
    std::optional<Rat> value2;  // Derived: propagation (parent ticks)
};

using Action = std::variant<SendMsg, ArmTimer, TaskFired, StartRelay, Note>;

/// Advances one node's state machine by one input. Deterministic and free of
/// side effects: the same (state, input, now) always yields the same new
/// state and actions, so recorded event logs replay exactly.
std::vector<Action> step(SyncState& state, const NodeBehavior& behavior, const Input& input,
                         const Ticks& now);

}  // namespace syncfire
