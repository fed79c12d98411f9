#pragma once
// Stream derivation. Every replica, level and purpose gets its own engine so
// results do not depend on thread count or scheduling.

#include <cstdint>
#include <initializer_list>
#include <random>

namespace maxstab {

using Engine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t stream_key(std::uint64_t seed, std::initializer_list<std::uint64_t> ids) {
    std::uint64_t h = splitmix64(seed);
    for (auto id : ids) h = splitmix64(h ^ splitmix64(id + 0x632be59bd9b4e019ULL));
    return h;
}

inline Engine make_engine(std::uint64_t seed, std::initializer_list<std::uint64_t> ids) {
    std::seed_seq seq{stream_key(seed, ids), stream_key(seed ^ 0xa5a5a5a5ULL, ids)};
    return Engine(seq);
}

// Counter-based uniform in [0,1): a pure function of its key.
inline double hash_uniform(std::uint64_t key) {
    return static_cast<double>(splitmix64(key) >> 11) * 0x1.0p-53;
}

// Purpose tags keep streams of different experiments apart.
enum StreamTag : std::uint64_t {
    kTagPath = 1,
    kTagCoupled = 2,
    kTagSigns = 3,
    kTagSubordinator = 4,
    kTagPoints = 5,
    kTagPrune = 6,
    kTagMatch = 7,
    kTagFormula = 8,
    kTagCalibration = 9,
};

}  // namespace maxstab
