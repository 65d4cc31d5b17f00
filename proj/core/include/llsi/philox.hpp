#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace llsi {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).  A pure
// function of (counter, key), so every pixel of a render can draw its own
// noise sample independently of scan order or worker partitioning.
struct Philox4x32 {
    using counter_type = std::array<uint32_t, 4>;
    using key_type = std::array<uint32_t, 2>;

    static counter_type generate(counter_type ctr, key_type key) {
        for (int round = 0; round < 10; ++round) {
            ctr = one_round(ctr, key);
            key[0] += 0x9E3779B9u;
            key[1] += 0xBB67AE85u;
        }
        return ctr;
    }

private:
    static counter_type one_round(const counter_type& x, const key_type& k) {
        uint64_t p0 = uint64_t(0xD2511F53u) * x[0];
        uint64_t p1 = uint64_t(0xCD9E8D57u) * x[2];
        return {uint32_t(p1 >> 32) ^ x[1] ^ k[0], uint32_t(p1),
                uint32_t(p0 >> 32) ^ x[3] ^ k[1], uint32_t(p0)};
    }
};

/// Standard normal deviate keyed by (seed, x, y, stream); Box-Muller over
/// two 32-bit Philox words.
inline double counter_normal(uint64_t seed, uint32_t x, uint32_t y, uint32_t stream = 0) {
    Philox4x32::counter_type ctr{x, y, stream, 0x11510b5eu};
    Philox4x32::key_type key{uint32_t(seed), uint32_t(seed >> 32)};
    auto out = Philox4x32::generate(ctr, key);
    double u1 = (out[0] + 1.0) * 0x1p-32;  // (0, 1]
    double u2 = out[1] * 0x1p-32;          // [0, 1)
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

/// Uniform double in [0, 1) keyed the same way.
inline double counter_uniform(uint64_t seed, uint32_t x, uint32_t y, uint32_t stream = 0) {
    Philox4x32::counter_type ctr{x, y, stream, 0x7f4a7c15u};
    Philox4x32::key_type key{uint32_t(seed), uint32_t(seed >> 32)};
    auto out = Philox4x32::generate(ctr, key);
    return ((uint64_t(out[0]) << 21) ^ out[1]) * 0x1p-53;
}

} // namespace llsi
