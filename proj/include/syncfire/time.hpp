#pragma once

#include "syncfire/rational.hpp"

#include <cstdint>
#include <string>
#include <string_view>

namespace syncfire {

/// Ground-truth simulation time in integer nanoseconds. This is the
/// observable axis (event-log lines, CSV outputs); the simulator keeps an
/// exact rational time internally and projects onto this type.
struct GlobalTime {
    std::int64_t nanos = 0;

    auto operator<=>(const GlobalTime&) const = default;
};

/// Projection of an exact time onto the integer-nanosecond axis
/// (round-half-away, range-checked).
inline GlobalTime to_global(const Rat& exact_ns) { return GlobalTime{exact_ns.round_to_i64()}; }

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parses a duration with unit suffix ("10us", "2.5ms", "1s", "500ns") into
/// exact integer nanoseconds. Sub-nanosecond fractions are rejected.
inline std::int64_t parse_duration_ns(std::string_view text) {
    const auto bad = [&](const char* why) {
        return ParseError("bad duration '" + std::string(text) + "': " + why);
    };
    std::size_t unit_at = text.size();
    while (unit_at > 0 && !(text[unit_at - 1] >= '0' && text[unit_at - 1] <= '9')) --unit_at;
    const std::string_view unit = text.substr(unit_at);
    const std::string_view number = text.substr(0, unit_at);
    if (number.empty()) throw bad("missing number");
    std::int64_t scale = 0;
    if (unit == "ns")
        scale = 1;
    else if (unit == "us")
        scale = 1000;
    else if (unit == "ms")
        scale = 1000 * 1000;
    else if (unit == "s")
        scale = 1000 * 1000 * 1000;
    else
        throw bad("unit must be ns, us, ms or s");
    Rat value;
    try {
        value = Rat::parse(number) * Rat(scale);
    } catch (const ArithmeticError&) {
        throw bad("malformed number");
    }
    if (!value.is_integer()) throw bad("not a whole number of nanoseconds");
    return value.round_to_i64();
}

/// Fixed-point decimal of value/10^digits with exactly `digits` decimals,
/// computed in integer arithmetic (no floating point, stable everywhere).
inline std::string fixed_decimal(std::int64_t value, int digits) {
    std::string sign;
    std::uint64_t mag;
    if (value < 0) {
        sign = "-";
        mag = static_cast<std::uint64_t>(-(value + 1)) + 1;
    } else {
        mag = static_cast<std::uint64_t>(value);
    }
    std::uint64_t pow = 1;
    for (int i = 0; i < digits; ++i) pow *= 10;
    std::string frac = std::to_string(mag % pow);
    frac.insert(frac.begin(), digits - frac.size(), '0');
    return sign + std::to_string(mag / pow) + (digits > 0 ? "." + frac : "");
}

/// Nanoseconds as microseconds with 3 decimals ("2250.000").
inline std::string ns_as_us(std::int64_t ns) { return fixed_decimal(ns, 3); }

/// Nanoseconds as milliseconds with 3 decimals, i.e. microsecond precision;
/// the sub-microsecond part is rounded first (ties away from zero).
inline std::string ns_as_ms_us_precision(std::int64_t ns) {
    const std::int64_t us = (Rat(ns) / Rat(1000)).round_to_i64();
    return fixed_decimal(us, 3);
}

/// Nanoseconds as a trimmed millisecond string ("500", "2.25").
inline std::string ns_as_ms_trimmed(std::int64_t ns) {
    std::string s = fixed_decimal(ns, 6);
    const auto dot = s.find('.');
    auto end = s.size();
    while (end > dot + 1 && s[end - 1] == '0') --end;
    if (end == dot + 1) end = dot;
    return s.substr(0, end);
}

}  // namespace syncfire
