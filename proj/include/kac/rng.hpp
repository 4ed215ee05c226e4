#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

namespace kac {

// Counter-based random stream built on the splitmix64 finalizer.  The state
// walks a fixed 2^64 cycle; (seed, stream_id) is hashed to a starting point,
// so distinct streams are independent random seeks into the cycle and the
// same pair reproduces the sequence bit-exactly on any platform.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id = 0)
        : seed_(seed), stream_id_(stream_id) {
        state_ = mix(mix(seed ^ 0x9E3779B97F4A7C15ull) + mix(stream_id * 0xBF58476D1CE4E5B9ull + 1));
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    // Derived stream for shard k of a parallel estimator.  Deterministic and
    // independent of how many worker threads execute the shards.
    RngStream substream(std::uint64_t k) const {
        return RngStream(seed_, stream_id_ * 1000003ull + k + 1);
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        return mix(state_);
    }

    // Uniform on [0, 1), 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform on (0, 1); safe as a log() argument.
    double next_open() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Uniform index in [0, n).  Bias is O(n / 2^53), irrelevant at our scales.
    std::size_t uniform_index(std::size_t n) {
        std::size_t k = static_cast<std::size_t>(next_double() * static_cast<double>(n));
        return k < n ? k : n - 1;
    }

    // (cos t, sin t) for t uniform on [0, 2pi), via the Marsaglia polar map:
    // a uniform point (u,v) on the disk has uniform angle, and doubling it
    // through (u^2-v^2, 2uv)/(u^2+v^2) keeps the squared norm at 1 to a few ulp
    // without calling sincos.
    std::pair<double, double> unit_angle() {
        for (;;) {
            const double u = 2.0 * next_double() - 1.0;
            const double v = 2.0 * next_double() - 1.0;
            const double s = u * u + v * v;
            if (s > 0.0 && s <= 1.0) {
                const double inv = 1.0 / s;
                return {(u * u - v * v) * inv, 2.0 * u * v * inv};
            }
        }
    }

    // Standard normal via Box-Muller (explicit so the sequence is portable;
    // std::normal_distribution is implementation-defined).
    double normal() {
        const double r = std::sqrt(-2.0 * std::log(next_open()));
        const double t = 6.283185307179586476925286766559 * next_double();
        return r * std::cos(t);
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t state_;
};

}  // namespace kac
