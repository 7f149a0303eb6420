#pragma once

#include <cstdint>

namespace polargp {

// splitmix64 finalizer. All pseudo-randomness in the library is built on
// this mix so that results are bit-reproducible across platforms (the
// standard <random> distributions are not).
inline uint64_t mix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline uint64_t hash_str64(const char* s) {
    uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (; *s; ++s) {
        h ^= static_cast<unsigned char>(*s);
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Minimal counter-style generator.
class Rng64 {
public:
    explicit Rng64(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0,1), 53-bit resolution
    double next_u01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // uniform integer in [0, m)
    uint64_t next_below(uint64_t m) { return next() % m; }

    uint8_t next_bit() { return static_cast<uint8_t>(next() >> 63); }

private:
    uint64_t state_;
};

}  // namespace polargp
