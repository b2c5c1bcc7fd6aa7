#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace deconvar {

/// Deterministic random stream (xoshiro256++ core, SplitMix64 seeding).
///
/// All sampling used by the library goes through this class so that results
/// are bit-reproducible across platforms and thread counts.  Streams derived
/// via split() from the same master seed are statistically independent, which
/// is how Monte Carlo replications get their per-replication randomness.
class RngStream {
public:
    /// Expand a single seed into a full generator state.
    static RngStream seeded(std::uint64_t seed) {
        RngStream g;
        std::uint64_t sm = seed;
        for (auto& word : g.state_) word = splitmix64(sm);
        g.ensure_nonzero();
        return g;
    }

    /// Derive the stream for a numbered substream (replication, chain, ...).
    /// Distinct indices give decorrelated streams for the same master seed.
    static RngStream split(std::uint64_t master_seed, std::uint64_t stream_index) {
        RngStream g;
        std::uint64_t sm = master_seed ^ (0x9e3779b97f4a7c15ULL * (stream_index + 1));
        sm += 0xbf58476d1ce4e5b9ULL;
        for (auto& word : g.state_) word = splitmix64(sm);
        g.ensure_nonzero();
        return g;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform draw in [0, 1) with 53 random bits.
    double next_uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Standard normal draw (Box-Muller, pairs cached).
    double next_standard_normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        // 1 - U keeps the argument of log strictly positive.
        const double u1 = 1.0 - next_uniform01();
        const double u2 = next_uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        cached_ = r * std::sin(angle);
        has_cached_ = true;
        return r * std::cos(angle);
    }

    bool next_bit() { return (next_u64() >> 63) != 0; }

private:
    static std::uint64_t splitmix64(std::uint64_t& x) {
        x += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    void ensure_nonzero() {
        // The all-zero state is the one fixed point of the generator.
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0)
            state_[0] = 0x1ULL;
    }

    std::array<std::uint64_t, 4> state_{};
    bool has_cached_ = false;
    double cached_ = 0.0;
};

} // namespace deconvar
