#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

namespace uqkit::rng {

// Counter-based deterministic randomness. Every random decision in the
// synthetic world is a pure function of (seed, record id, stream, counter),
// so regeneration order never matters.

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t hash_str(std::string_view s) {
    // FNV-1a 64-bit.
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

struct Key {
    std::uint64_t seed = 0;
    std::uint64_t record = 0;
    std::uint64_t stream = 0;

    Key with_stream(std::uint64_t s) const { return {seed, record, s}; }
};

inline Key make_key(std::uint64_t seed, std::string_view record_id, std::uint64_t stream) {
    return {seed, hash_str(record_id), stream};
}

inline std::uint64_t bits(const Key& k, std::uint64_t counter) {
    std::uint64_t h = mix64(k.seed);
    h = mix64(h ^ k.record);
    h = mix64(h ^ k.stream);
    return mix64(h ^ counter);
}

// Uniform in [0, 1).
inline double uniform(const Key& k, std::uint64_t counter) {
    return static_cast<double>(bits(k, counter) >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n).
inline std::uint64_t uniform_int(const Key& k, std::uint64_t counter, std::uint64_t n) {
    return bits(k, counter) % n;
}

inline double uniform_range(const Key& k, std::uint64_t counter, double lo, double hi) {
    return lo + (hi - lo) * uniform(k, counter);
}

}  // namespace uqkit::rng
