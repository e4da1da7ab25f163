#include "syncfire/event_log.hpp"

#include <sstream>

namespace syncfire {

const char* to_string(RecordKind kind) {
    switch (kind) {
        case RecordKind::SessionInit: return "session_init";
        case RecordKind::Send: return "send";
        case RecordKind::Recv: return "recv";
        case RecordKind::Lost: return "lost";
        case RecordKind::Dropped: return "dropped";
        case RecordKind::Ignored: return "ignored";
        case RecordKind::Busy: return "busy";
        case RecordKind::State: return "state";
        case RecordKind::Arm: return "arm";
        case RecordKind::Timer: return "timer";
        case RecordKind::Derived: return "derived";
        case RecordKind::SessionComplete: return "session_complete";
        case RecordKind::Aborted: return "aborted";
        case RecordKind::StartIssued: return "start_issued";
        case RecordKind::Deadline: return "deadline";
        case RecordKind::Fire: return "fire";
        case RecordKind::Miss: return "miss";
        case RecordKind::ForwardSkipped: return "forward_skipped";
        case RecordKind::Incomplete: return "incomplete";
    }
    return "?";
}

std::string to_line(const Record& record, const std::vector<std::string>& node_names) {
    const auto name = [&](NodeIndex node) -> std::string {
        if (node < node_names.size()) return node_names[node];
        return "#" + std::to_string(node);
    };
    std::ostringstream line;
    line << "seq=" << record.seq << " t=" << record.time().nanos << " node=" << name(record.node)
         << " kind=" << to_string(record.kind);
    if (!record.t_exact.is_integer()) line << " t_exact=" << record.t_exact.str();
    if (record.msg) line << " msg=" << to_string(*record.msg);
    if (record.session)
        line << " session=" << name(record.session->initiator) << "#" << record.session->seq;
    if (record.peer) line << " peer=" << name(*record.peer);
    if (record.local) line << " local=" << record.local->str();
    if (record.value) line << " value=" << record.value->str();
    if (record.value2) line << " value2=" << record.value2->str();
    if (!record.reason.empty()) line << " reason=\"" << record.reason << "\"";
    return line.str();
}

std::string EventLog::serialize(const std::vector<std::string>& node_names) const {
    std::string out;
    for (const auto& record : records_) {
        out += to_line(record, node_names);
        out += '\n';
    }
    return out;
}

}  // namespace syncfire
