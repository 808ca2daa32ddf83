#pragma once

#include <cstdint>

namespace promarket {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Counter-based stream: draw j of sample i depends only on (seed, i, j), so
// Monte Carlo results are independent of how samples are sharded across workers.
struct CounterRng {
    std::uint64_t key;
    std::uint64_t counter;

    std::uint64_t next_u64() { return splitmix64(splitmix64(counter++) ^ key); }

    // uniform in [0, 1)
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
};

inline CounterRng sample_stream(std::uint64_t seed, std::uint64_t sample_index) {
    // 2^16 draws reserved per sample; no overlap between samples
    return CounterRng{splitmix64(seed), sample_index << 16};
}

}  // namespace promarket
