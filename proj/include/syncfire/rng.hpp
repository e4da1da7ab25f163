#pragma once

#include "syncfire/rational.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

namespace syncfire {

// Self-contained generators so that draws are bit-identical on every
// platform; the standard <random> distributions are not pinned by the
// standard and would break byte-for-byte reproducibility of outputs.

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t hash_name(std::string_view name) {
    // FNV-1a
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : name) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// xoshiro256** seeded through splitmix64.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : s_) word = splitmix64(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform integer in [lo, hi], inclusive. Rejection sampling, unbiased.
    std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
        if (lo > hi) throw ArithmeticError("uniform: empty range");
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo);
        if (span == UINT64_MAX) return static_cast<std::int64_t>(next());
        const std::uint64_t n = span + 1;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t draw = next();
        while (draw >= limit) draw = next();
        return lo + static_cast<std::int64_t>(draw % n);
    }

    /// True with exact probability p (a rational in [0, 1]).
    bool chance(const Rat& p) {
        if (p.is_zero()) {
            return false;
        }
        if (p >= Rat(1)) {
            next();  // keep the stream position independent of p
            return true;
        }
        // threshold = floor(p * 2^64); draw < threshold has probability
        // within 2^-64 of p, exact when den divides 2^64.
        const BigInt threshold = (p.num() << 64) / p.den();
        return BigInt(next()) < threshold;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

/// Named substreams derived from one run seed. Creating (or never touching)
/// one stream does not perturb any other, so adding a node to a scenario
/// leaves unrelated draws unchanged.
class StreamSet {
public:
    explicit StreamSet(std::uint64_t run_seed) : run_seed_(run_seed) {}

    Rng& stream(const std::string& name) {
        auto it = streams_.find(name);
        if (it == streams_.end()) {
            std::uint64_t mix = run_seed_ ^ hash_name(name);
            const std::uint64_t derived = splitmix64(mix);
            it = streams_.emplace(name, Rng(derived)).first;
        }
        return it->second;
    }

private:
    std::uint64_t run_seed_;
    std::map<std::string, Rng> streams_;
};

/// One deterministic seed per (scenario seed, sweep position, repetition).
inline std::uint64_t derive_run_seed(std::uint64_t scenario_seed, std::uint64_t interval_index,
                                     std::uint64_t repetition) {
    std::uint64_t sm = scenario_seed;
    std::uint64_t h = splitmix64(sm);
    sm = h ^ (interval_index * 0x9e3779b97f4a7c15ULL + 0x243f6a8885a308d3ULL);
    h = splitmix64(sm);
    sm = h ^ (repetition * 0xd1b54a32d192ed03ULL + 0x452821e638d01377ULL);
    return splitmix64(sm);
}

}  // namespace syncfire
