#pragma once

#include "syncfire/rational.hpp"
#include "syncfire/ticks.hpp"

#include <cstdint>
#include <string>
#include <variant>

namespace syncfire {

/// One synchronization attempt, identified by its initiator and a sequence
/// number; every message of the attempt carries the same id.
struct SessionId {
    NodeIndex initiator = 0;
    std::uint32_t seq = 0;

    bool operator==(const SessionId&) const = default;
    auto operator<=>(const SessionId&) const = default;
};

// The five protocol messages of one hop, plus the start signal.
struct Mark1 {};  // first interval marker (broadcast by the hop initiator)
struct Mark2 {};  // second interval marker
struct Reply {};  // active slave's response to Mark2
struct Report {   // initiator -> slaves: its own interval and measured round trip
    Rat mark_interval;  // initiator ticks between Mark1 and Mark2 sends
    Rat roundtrip;      // initiator ticks between Mark2 send and Reply reception
};
struct Share {  // active slave -> passive slaves: derived propagation time
    Rat propagation;  // in initiator (parent) ticks
};
struct StartMsg {  // countdown to the task, in the sender's own ticks
    Rat interval;
};

enum class MsgKind { Mark1, Mark2, Reply, Report, Share, Start };

struct SyncMessage {
    SessionId session;
    NodeIndex sender = 0;
    std::variant<Mark1, Mark2, Reply, Report, Share, StartMsg> body;

    MsgKind kind() const { return static_cast<MsgKind>(body.index()); }
};

inline const char* to_string(MsgKind kind) {
    switch (kind) {
        case MsgKind::Mark1: return "mark1";
        case MsgKind::Mark2: return "mark2";
        case MsgKind::Reply: return "reply";
        case MsgKind::Report: return "report";
        case MsgKind::Share: return "share";
        case MsgKind::Start: return "start";
    }
    return "?";
}

/// True for the five synchronization messages (everything except Start).
inline bool is_protocol_message(MsgKind kind) { return kind != MsgKind::Start; }

}  // namespace syncfire
