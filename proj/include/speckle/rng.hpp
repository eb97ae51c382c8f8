#pragma once

#include <cmath>
#include <cstdint>

namespace speckle {

// Counter-based random stream. Each (seed, stream_id) pair yields an
// independent, reproducible sequence, so per-frame streams can be drawn
// in any order (or in parallel) and still produce identical results.
//
// The generator is splitmix64; its finalizer doubles as the mixing
// function for deriving the initial state from (seed, stream_id).
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : state_(mix(mix(seed + 0x9e3779b97f4a7c15ull) ^ mix(stream_id + 0xbf58476d1ce4e5b9ull))) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix(state_);
    }

    // uniform in [0, 1)
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // standard normal, Box-Muller with a cached spare
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1, u2;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ull;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Stream id tags keep the consumers of one seed from colliding.
namespace stream_tag {
inline constexpr std::uint64_t kInitialPositions = 0x1000'0000'0000'0000ull;
inline constexpr std::uint64_t kBrownianStepBase = 0x2000'0000'0000'0000ull;
inline constexpr std::uint64_t kStaticSubstrate  = 0x3000'0000'0000'0000ull;
inline constexpr std::uint64_t kFlickerBase      = 0x4000'0000'0000'0000ull;
inline constexpr std::uint64_t kBarBase          = 0x5000'0000'0000'0000ull;
inline constexpr std::uint64_t kSkewEvents       = 0x6000'0000'0000'0000ull;
inline constexpr std::uint64_t kScenarioBase     = 0x7000'0000'0000'0000ull;
} // namespace stream_tag

} // namespace speckle
