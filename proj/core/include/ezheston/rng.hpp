#pragma once

#include <cstdint>

namespace ezheston {

// SplitMix64 (Steele, Lea, Flood); expands a 64-bit seed into stream state.
struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

// xoshiro256++ (Blackman & Vigna reference construction).
class Xoshiro256pp {
    std::uint64_t s_[4];
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

public:
    explicit Xoshiro256pp(SplitMix64 sm) {
        for (auto& w : s_) w = sm.next();
        s_[0] |= 1; // the all-zero state is the one forbidden point
    }
    std::uint64_t next() {
        std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }
    // Uniform on the open interval (0, 1); 53 significant bits.
    double uniform01() {
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    }
};

// Independent substream for one path, derived from (seed, stream index) so
// paths can be regenerated individually and in any order.
inline Xoshiro256pp substream(std::uint64_t seed, std::uint64_t stream) {
    SplitMix64 a(seed);
    std::uint64_t k0 = a.next();
    std::uint64_t k1 = a.next();
    return Xoshiro256pp(SplitMix64(k0 ^ (stream * 0x9e3779b97f4a7c15ULL + k1)));
}

// Standard normal quantile, Wichura's PPND16 rational approximation.
// Accurate to about 1e-15 on (0, 1).
double inverse_normal_cdf(double u);

// Inverse-CDF draw; negating the result gives the exact antithetic partner.
inline double standard_normal(Xoshiro256pp& g) {
    return inverse_normal_cdf(g.uniform01());
}

} // namespace ezheston
