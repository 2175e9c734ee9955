#pragma once

#include <cstdint>
#include <random>

namespace fwr {

/// splitmix64 mixing step; used to derive independent per-trajectory streams
/// from a (seed, index) pair so ensembles are reproducible under any
/// parallel schedule.
inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::mt19937_64 derived_stream(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = splitmix64(seed ^ splitmix64(index + 0x1234abcdULL));
    return std::mt19937_64(s);
}

}  // namespace fwr
