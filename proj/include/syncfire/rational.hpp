#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace syncfire {

/// Backing integer for exact time arithmetic. Checked: any overflow throws
/// instead of wrapping, which is the required fatal-error behavior for the
/// simulation time axis.
using BigInt = boost::multiprecision::checked_int512_t;

struct ArithmeticError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Exact rational number. Always normalized: den > 0, gcd(num, den) = 1.
///
/// This is the workhorse of the whole simulator: clock drift factors, tick
/// counts, and event times are kept exact so that the zero-jitter
/// synchronization algebra telescopes to literally zero error.
class Rat {
public:
    Rat() : num_(0), den_(1) {}
    Rat(std::int64_t value) : num_(value), den_(1) {}  // NOLINT: implicit by design
    Rat(BigInt num, BigInt den) : num_(std::move(num)), den_(std::move(den)) { normalize(); }

    static Rat of(std::int64_t num, std::int64_t den) { return Rat(BigInt(num), BigInt(den)); }

    const BigInt& num() const { return num_; }
    const BigInt& den() const { return den_; }

    bool is_integer() const { return den_ == 1; }
    bool is_zero() const { return num_ == 0; }
    bool is_negative() const { return num_ < 0; }
    bool is_positive() const { return num_ > 0; }

    Rat operator-() const { return Rat(unchecked{}, -num_, den_); }

    Rat operator+(const Rat& o) const {
        return Rat(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
    }
    Rat operator-(const Rat& o) const {
        return Rat(num_ * o.den_ - o.num_ * den_, den_ * o.den_);
    }
    Rat operator*(const Rat& o) const { return Rat(num_ * o.num_, den_ * o.den_); }
    Rat operator/(const Rat& o) const {
        if (o.num_ == 0) throw ArithmeticError("rational division by zero");
        return Rat(num_ * o.den_, den_ * o.num_);
    }

    Rat& operator+=(const Rat& o) { return *this = *this + o; }
    Rat& operator-=(const Rat& o) { return *this = *this - o; }
    Rat& operator*=(const Rat& o) { return *this = *this * o; }
    Rat& operator/=(const Rat& o) { return *this = *this / o; }

    bool operator==(const Rat& o) const { return num_ == o.num_ && den_ == o.den_; }
    std::strong_ordering operator<=>(const Rat& o) const {
        // Denominators are positive, so cross-multiplication preserves order.
        const BigInt lhs = num_ * o.den_;
        const BigInt rhs = o.num_ * den_;
        if (lhs < rhs) return std::strong_ordering::less;
        if (lhs > rhs) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

    /// Largest integer <= value.
    BigInt floor() const {
        BigInt q = num_ / den_;
        if (num_ < 0 && q * den_ != num_) --q;
        return q;
    }

    /// Nearest integer, ties away from zero.
    BigInt round_half_away() const {
        const BigInt twice = 2 * num_;
        BigInt q = (num_ >= 0) ? (twice + den_) / (2 * den_) : -((-twice + den_) / (2 * den_));
        return q;
    }

    /// Nearest integer (ties away), range-checked into int64.
    std::int64_t round_to_i64() const {
        const BigInt r = round_half_away();
        if (r > std::numeric_limits<std::int64_t>::max() ||
            r < std::numeric_limits<std::int64_t>::min())
            throw ArithmeticError("rational out of int64 range: " + str());
        return r.convert_to<std::int64_t>();
    }

    double approx() const { return num_.convert_to<double>() / den_.convert_to<double>(); }

    /// "n" when integral, "n/d" otherwise. Canonical (reduced) form.
    std::string str() const {
        if (den_ == 1) return num_.str();
        return num_.str() + "/" + den_.str();
    }

    /// Parses "123", "-4/7" or exact decimals like "1.0225".
    static Rat parse(std::string_view text);

private:
    struct unchecked {};
    Rat(unchecked, BigInt num, BigInt den) : num_(std::move(num)), den_(std::move(den)) {}

    void normalize() {
        if (den_ == 0) throw ArithmeticError("rational with zero denominator");
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        if (num_ == 0) {
            den_ = 1;
            return;
        }
        const BigInt g = boost::multiprecision::gcd(num_ < 0 ? BigInt(-num_) : num_, den_);
        if (g > 1) {
            num_ /= g;
            den_ /= g;
        }
    }

    BigInt num_;
    BigInt den_;
};

inline Rat Rat::parse(std::string_view text) {
    const auto bad = [&] { return ArithmeticError("cannot parse rational: '" + std::string(text) + "'"); };
    if (text.empty()) throw bad();
    const auto slash = text.find('/');
    if (slash != std::string_view::npos) {
        const std::string n(text.substr(0, slash));
        const std::string d(text.substr(slash + 1));
        if (n.empty() || d.empty()) throw bad();
        try {
            return Rat(BigInt(n), BigInt(d));
        } catch (const std::exception&) {
            throw bad();
        }
    }
    bool neg = false;
    std::size_t i = 0;
    if (text[0] == '+' || text[0] == '-') {
        neg = text[0] == '-';
        i = 1;
    }
    BigInt num = 0;
    BigInt den = 1;
    bool seen_digit = false;
    bool seen_dot = false;
    for (; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '.') {
            if (seen_dot) throw bad();
            seen_dot = true;
            continue;
        }
        if (c < '0' || c > '9') throw bad();
        num = num * 10 + (c - '0');
        if (seen_dot) den *= 10;
        seen_digit = true;
    }
    if (!seen_digit) throw bad();
    if (neg) num = -num;
    return Rat(num, den);
}

}  // namespace syncfire
