#pragma once

#include <cstdint>
#include <random>

namespace lcf {

/// splitmix64 mixer; used to derive independent child seeds from one root
/// seed so that every component draws from its own stream.
inline std::uint64_t mix_seed(std::uint64_t seed) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic child seed for a named component index.
/// derive_seed(s, a) != derive_seed(s, b) for a != b with overwhelming odds.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) {
    return mix_seed(root ^ mix_seed(stream));
}

inline std::mt19937_64 make_rng(std::uint64_t seed) {
    return std::mt19937_64(seed);
}

} // namespace lcf
