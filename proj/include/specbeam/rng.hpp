#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace specbeam {

/// Derives a child seed from a root seed, a stream name and up to two
/// integer qualifiers. All randomness in the artifact flows from one
/// top-level seed through these named substreams, so parallel evaluation
/// order can never change the draws.
inline std::uint64_t substream_seed(std::uint64_t root, std::string_view name,
                                    std::uint64_t a = 0, std::uint64_t b = 0) {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a 64
    auto mix = [&h](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xff;
            h *= 1099511628211ull;
        }
    };
    mix(root);
    for (char c : name) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    mix(a);
    mix(b);
    // splitmix64 finalizer so nearby inputs decorrelate
    h += 0x9e3779b97f4a7c15ull;
    h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ull;
    h = (h ^ (h >> 27)) * 0x94d049bb133111ebull;
    return h ^ (h >> 31);
}

inline std::mt19937_64 substream_rng(std::uint64_t root, std::string_view name,
                                     std::uint64_t a = 0, std::uint64_t b = 0) {
    return std::mt19937_64(substream_seed(root, name, a, b));
}

}  // namespace specbeam
