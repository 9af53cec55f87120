#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace patchcp {

using Rng = std::mt19937_64;

// SplitMix64 finalizer. Used only to spread seeds, never as the main stream.
inline uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Substream seed for replica k of a root seed:
//   seed_k = splitmix64(root + (k+1) * 0x9E3779B97F4A7C15).
// Replica k sees the same stream no matter how replicas are scheduled,
// which keeps multi-threaded estimates bit-identical to serial ones.
inline uint64_t substream_seed(uint64_t root, uint64_t k) {
    return splitmix64(root + (k + 1) * 0x9E3779B97F4A7C15ull);
}

// Uniform in [0,1) from the top 53 bits. std::uniform_real_distribution is
// implementation-defined, which would break bit-identical reruns.
inline double uniform01(Rng& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n), n >= 1. Floor of n*U keeps the draw count at one
// word per variate; the modulo bias of ~n/2^53 is irrelevant at our n.
inline int uniform_int(Rng& g, int n) {
    int k = static_cast<int>(static_cast<double>(n) * uniform01(g));
    return k < n ? k : n - 1;
}

// Exponential waiting time with the given rate (> 0).
inline double exponential(Rng& g, double rate) {
    return -std::log1p(-uniform01(g)) / rate;
}

}  // namespace patchcp
