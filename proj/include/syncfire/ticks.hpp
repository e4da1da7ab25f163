#pragma once

#include "syncfire/rational.hpp"

#include <cstdint>
#include <stdexcept>

namespace syncfire {

using NodeIndex = std::uint32_t;

struct ClockDomainError : std::logic_error {
    using std::logic_error::logic_error;
};

/// A count of one node's clock ticks (nominal nanoseconds of that node's
/// oscillator). Carries the owning node so two clocks can never be mixed by
/// accident: +, -, and comparisons require the same owner and throw
/// otherwise. Crossing domains is only possible through the explicit
/// drift/propagation conversions in the protocol module.
class Ticks {
public:
    Ticks(NodeIndex owner, Rat value) : owner_(owner), value_(std::move(value)) {}

    NodeIndex owner() const { return owner_; }
    const Rat& value() const { return value_; }

    Ticks operator+(const Rat& span) const { return Ticks(owner_, value_ + span); }
    Ticks operator-(const Rat& span) const { return Ticks(owner_, value_ - span); }

    Rat operator-(const Ticks& o) const {
        require_same(o);
        return value_ - o.value_;
    }
    bool operator==(const Ticks& o) const {
        require_same(o);
        return value_ == o.value_;
    }
    bool operator<(const Ticks& o) const {
        require_same(o);
        return value_ < o.value_;
    }
    bool operator<=(const Ticks& o) const {
        require_same(o);
        return value_ <= o.value_;
    }

private:
    void require_same(const Ticks& o) const {
        if (owner_ != o.owner_)
            throw ClockDomainError("tick arithmetic across clock domains (node " +
                                   std::to_string(owner_) + " vs node " + std::to_string(o.owner_) +
                                   ")");
    }

    NodeIndex owner_;
    Rat value_;
};

}  // namespace syncfire
