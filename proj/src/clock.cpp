#include "syncfire/clock.hpp"

namespace syncfire {

namespace {

// Integer-nanosecond jitter bound for a timed duration: floor(D * ppm / 1e6).
std::int64_t jitter_bound(const Rat& duration_ns, std::int64_t ppm) {
    if (ppm == 0 || !duration_ns.is_positive()) return 0;
    const Rat bound = duration_ns * Rat(ppm) / Rat(1000000);
    return bound.floor().convert_to<std::int64_t>();
}

std::int64_t draw_jitter(const Rat& duration_ns, std::int64_t ppm, Rng& rng) {
    const std::int64_t bound = jitter_bound(duration_ns, ppm);
    if (bound == 0) return 0;  // no draw: zero-jitter paths leave the stream untouched
    return rng.uniform(-bound, bound);
}

}  // namespace

Rat ClockModel::local_elapsed(const Rat& true_interval_ns, Rng& jitter) const {
    if (true_interval_ns.is_negative())
        throw ArithmeticError("local_elapsed: negative interval " + true_interval_ns.str());
    return true_interval_ns * drift_factor + Rat(draw_jitter(true_interval_ns, jitter_bound_ppm, jitter));
}

Rat ClockModel::quantize_ticks(const Rat& requested_ticks) const {
    if (timer_resolution_ns <= 1) return requested_ticks;
    const Rat res(timer_resolution_ns);
    return Rat((requested_ticks / res).floor(), 1) * res;
}

Rat ClockModel::true_duration_of_timer(const Rat& requested_ticks, Rng& jitter) const {
    if (requested_ticks.is_negative())
        throw ArithmeticError("timer armed for negative duration " + requested_ticks.str());
    const Rat quantized = quantize_ticks(requested_ticks);
    const Rat true_ns = quantized / drift_factor;
    return true_ns + Rat(draw_jitter(true_ns, jitter_bound_ppm, jitter));
}

ClockModel calibrate_from_table(const std::vector<TimerTableRow>& rows) {
    if (rows.empty()) throw ConfigError("timer-variation table is empty");
    Rat drift_sum;
    Rat worst_half_spread_ppm;
    for (const auto& row : rows) {
        if (row.nominal_ns <= 0) throw ConfigError("timer table: nominal period must be positive");
        if (row.min_ns > row.max_ns) throw ConfigError("timer table: min exceeds max");
        const Rat midpoint = Rat(row.min_ns + row.max_ns) / Rat(2);
        drift_sum += midpoint / Rat(row.nominal_ns);
        const Rat half_spread_ppm =
            Rat(row.max_ns - row.min_ns) * Rat(1000000) / (Rat(2) * Rat(row.nominal_ns));
        if (half_spread_ppm > worst_half_spread_ppm) worst_half_spread_ppm = half_spread_ppm;
    }
    ClockModel model;
    model.drift_factor = drift_sum / Rat(static_cast<std::int64_t>(rows.size()));
    model.jitter_bound_ppm = worst_half_spread_ppm.round_to_i64();
    model.timer_resolution_ns = 1;
    return model;
}

const std::vector<TimerTableRow>& atmel48_timer_table() {
    static const std::vector<TimerTableRow> rows = {
        {200'000, 204'500, 205'000},           // 0.2 ms
        {2'000'000, 2'043'000, 2'047'000},     // 2 ms
        {20'000'000, 20'439'000, 20'479'000},  // 20 ms
        {40'000'000, 40'881'000, 40'959'000},  // 40 ms
        {60'000'000, 61'578'000, 61'658'000},  // 60 ms
    };
    return rows;
}

const std::vector<TimerTableRow>& isense_timer_table() {
    static const std::vector<TimerTableRow> rows = {
        {2'000'000, 2'000'000, 2'002'000},     // 2 ms
        {4'000'000, 4'000'000, 4'002'000},     // 4 ms
        {20'000'000, 19'938'000, 20'000'000},  // 20 ms
        {40'000'000, 40'000'000, 40'000'000},  // 40 ms
    };
    return rows;
}

ClockModel clock_preset(const std::string& name) {
    if (name == "ideal") {
        return ClockModel{};
    }
    if (name == "atmel48") {
        ClockModel model = calibrate_from_table(atmel48_timer_table());
        model.timer_resolution_ns = 1000;  // microsecond timers
        return model;
    }
    if (name == "isense") {
        ClockModel model = calibrate_from_table(isense_timer_table());
        model.timer_resolution_ns = 1'000'000;  // firmware offers millisecond timers
        return model;
    }
    throw ConfigError("unknown clock profile '" + name + "'");
}

bool is_clock_preset(const std::string& name) {
    return name == "ideal" || name == "atmel48" || name == "isense";
}

Rat NodeClock::reading_at(const Rat& true_ns, Rng& jitter) {
    if (true_ns < last_true_)
        throw ArithmeticError("clock observed out of order at t=" + true_ns.str());
    last_reading_ += model_.local_elapsed(true_ns - last_true_, jitter);
    last_true_ = true_ns;
    return last_reading_;
}

Rat NodeClock::reading_at_deadline(const Rat& true_ns, const Rat& deadline_ticks) {
    if (true_ns < last_true_)
        throw ArithmeticError("clock observed out of order at t=" + true_ns.str());
    // Readings never run backwards even if jitter pushed a previous reading
    // past the deadline.
    last_reading_ = (deadline_ticks > last_reading_) ? deadline_ticks : last_reading_;
    last_true_ = true_ns;
    return last_reading_;
}

}  // namespace syncfire
