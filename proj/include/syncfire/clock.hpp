#pragma once

#include "syncfire/rational.hpp"
#include "syncfire/rng.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace syncfire {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A simulated hardware clock: a constant drift rate, bounded symmetric
/// per-timer jitter, and a settable-timer resolution.
///
/// drift_factor is local ticks elapsed per true nanosecond, kept as an exact
/// rational so that zero-jitter conversions are lossless in both directions.
struct ClockModel {
    Rat drift_factor = Rat(1);
    std::int64_t jitter_bound_ppm = 0;
    std::int64_t timer_resolution_ns = 1;
    std::string rng_stream;  // substream identity for this clock's jitter draws

    /// Ticks observed while `true_interval_ns` of real time elapses:
    /// interval * drift + one jitter draw (an integer number of ticks,
    /// uniform within +-interval*ppm*1e-6).
    Rat local_elapsed(const Rat& true_interval_ns, Rng& jitter) const;

    /// Real time until a timer armed for `requested_ticks` fires. The request
    /// is floored to the resolution grid first; resolution 1 is the identity
    /// (fractional tick deadlines are honored exactly).
    Rat true_duration_of_timer(const Rat& requested_ticks, Rng& jitter) const;

    /// Floor to the resolution grid (whole-tick multiples of the resolution).
    Rat quantize_ticks(const Rat& requested_ticks) const;
};

/// One measured row of a timer-variation table: nominal period and the
/// observed min/max, all in nanoseconds.
struct TimerTableRow {
    std::int64_t nominal_ns;
    std::int64_t min_ns;
    std::int64_t max_ns;
};

/// Fits the two-parameter clock model to a measured timer-variation table:
/// drift = mean of midpoint/nominal, jitter bound = worst half-spread in ppm.
ClockModel calibrate_from_table(const std::vector<TimerTableRow>& rows);

/// Named presets: "atmel48" and "isense" are the calibrated timer-variation
/// tables; "ideal" is a perfect 1:1 nanosecond clock.
ClockModel clock_preset(const std::string& name);
bool is_clock_preset(const std::string& name);

/// The measured tables behind the presets.
const std::vector<TimerTableRow>& atmel48_timer_table();
const std::vector<TimerTableRow>& isense_timer_table();

/// Lazily advanced view of one node's clock. Readings are exact rational
/// tick counts; they accumulate one local_elapsed per observation event.
/// A fire of the node's own timer reads exactly the armed deadline (timer
/// and clock count the same oscillator), clamped monotone in case an
/// intermediate jittered reading overtook it.
class NodeClock {
public:
    NodeClock() = default;
    explicit NodeClock(ClockModel model) : model_(std::move(model)) {}

    const ClockModel& model() const { return model_; }

    /// Reading at true time t (advances the clock; one jitter draw).
    Rat reading_at(const Rat& true_ns, Rng& jitter);

    /// Reading at a timer fire whose deadline tick count is known.
    Rat reading_at_deadline(const Rat& true_ns, const Rat& deadline_ticks);

private:
    ClockModel model_;
    Rat last_true_;
    Rat last_reading_;
};

}  // namespace syncfire
