// Copyright the abex authors. Licensed under the Apache License, Version 2.0;
// see LICENSE in the project root.

/**
 * \file rng.hpp
 *
 * Deterministic randomness. Streams are derived from a user seed and a
 * stream index through splitmix64, and drive a std::mt19937_64 whose output
 * sequence is pinned by the standard, so replays are portable across
 * platforms and independent of scheduling.
 */

#ifndef ABEX_RNG_HPP
#define ABEX_RNG_HPP

#include <cstdint>
#include <random>
#include <vector>

namespace abex {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Seed for substream `stream` of the generator family identified by `seed`.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t s = seed + 0x632be59bd9b4e019ull * (stream + 1);
    std::uint64_t a = splitmix64(s);
    return splitmix64(s) ^ a;
}

inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
    return std::mt19937_64(derive_stream(seed, stream));
}

/// Integer in [0, n). Modulo reduction: bias is negligible for our n and the
/// result is identical on every platform, unlike uniform_int_distribution.
inline std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
    return rng() % n;
}

/// Fisher-Yates with uniform_index; portable replacement for std::shuffle.
template <typename T>
void deterministic_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(uniform_index(rng, i));
        std::swap(v[i - 1], v[j]);
    }
}

/// Double in [lo, hi), from the top 53 bits of one draw.
inline double uniform_real(std::mt19937_64& rng, double lo, double hi) {
    double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
}

} // namespace abex

#endif // ABEX_RNG_HPP
