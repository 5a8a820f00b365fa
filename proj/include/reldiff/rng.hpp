#pragma once

#include <cstdint>

namespace reldiff {

/// splitmix64: 64-bit mixer used for seeding and substream derivation.
struct SplitMix64 {
    std::uint64_t state;
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

/// Counter-based substream derivation: distinct (master, index) pairs give
/// distinct, decorrelated engine seeds. Reproducible across platforms.
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) {
    SplitMix64 sm{master ^ 0x6a09e667f3bcc909ULL};
    std::uint64_t base = sm.next();
    SplitMix64 sm2{base + 0x9e3779b97f4a7c15ULL * (index + 1)};
    return sm2.next();
}

/// xoshiro256++ engine (Blackman & Vigna). State seeded through splitmix64.
struct Xoshiro256pp {
    std::uint64_t s[4];

    explicit Xoshiro256pp(std::uint64_t seed) {
        SplitMix64 sm{seed};
        for (auto& w : s) w = sm.next();
    }
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t next() {
        const std::uint64_t result = rotl(s[0] + s[3], 23) + s[0];
        const std::uint64_t t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = rotl(s[3], 45);
        return result;
    }
    /// uniform in [0, 1)
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    /// uniform in (0, 1), safe under log()
    double unit_open() {
        return (static_cast<double>(next() >> 12) + 0.5) * 0x1.0p-52;
    }
};

/// Ziggurat sampler for the standard normal (256 layers, 52-bit mantissa
/// path). Fully deterministic across platforms; tables are built once from
/// the canonical layer constants.
class ZigguratNormal {
public:
    double operator()(Xoshiro256pp& g) const;

    /// Table self-consistency diagnostics (used by tests).
    static double table_closure_defect();

private:
    struct Tables;
    static const Tables& tables();
};

/// Per-path random source: engine + normal sampler.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    double normal() { return zig_(eng_); }
    double unit() { return eng_.unit(); }
    Xoshiro256pp& engine() { return eng_; }

private:
    Xoshiro256pp eng_;
    ZigguratNormal zig_;
};

}  // namespace reldiff
