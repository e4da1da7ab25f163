#pragma once

#include "syncfire/message.hpp"
#include "syncfire/rational.hpp"
#include "syncfire/ticks.hpp"
#include "syncfire/time.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace syncfire {

enum class RecordKind {
    SessionInit,
    Send,
    Recv,
    Lost,
    Dropped,
    Ignored,
    Busy,
    State,
    Arm,
    Timer,
    Derived,
    SessionComplete,
    Aborted,
    StartIssued,
    Deadline,
    Fire,
    Miss,
    ForwardSkipped,
    Incomplete,
};

const char* to_string(RecordKind kind);

/// One observable simulation event. `t_exact` is the ground-truth rational
/// instant; `time()` is its integer-nanosecond projection used on the wire
/// format. `local` is the owner's clock reading where one exists.
struct Record {
    std::uint64_t seq = 0;
    Rat t_exact;
    NodeIndex node = 0;
    RecordKind kind = RecordKind::Send;

    std::optional<MsgKind> msg;
    std::optional<SessionId> session;
    std::optional<NodeIndex> peer;  // sender for Recv, receiver-less for Send
    std::optional<Rat> local;       // owner's clock reading (ticks)
    std::optional<Rat> value;       // payload / derived quantity
    std::optional<Rat> value2;
    std::string reason;

    GlobalTime time() const { return to_global(t_exact); }
};

/// Append-only trace of one run, serialized one record per line with a
/// stable field order so outputs can be compared byte for byte.
class EventLog {
public:
    void append(Record record) {
        record.seq = records_.size();
        records_.push_back(std::move(record));
    }

    const std::vector<Record>& records() const { return records_; }
    bool empty() const { return records_.empty(); }

    /// `seq t node kind [t_exact] [msg] [session] [peer] [local] [value] [value2] [reason]`
    std::string serialize(const std::vector<std::string>& node_names) const;

private:
    std::vector<Record> records_;
};

std::string to_line(const Record& record, const std::vector<std::string>& node_names);

}  // namespace syncfire
