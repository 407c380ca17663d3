#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>
#include <string_view>
#include <vector>

namespace gsmote {

// Deterministic random stream with a fixed draw protocol. All distributions
// are implemented here on top of the raw mt19937_64 output so that results do
// not depend on the standard library's (implementation-defined)
// distribution algorithms. Consumption per call:
//   uniform()  -> 1 engine output
//   below(n)   -> 1 engine output
//   normal()   -> 2 engine outputs (Box-Muller, cosine branch only)
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform double in [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(engine_()) * n) >> 64);
    }

    // Standard normal draw.
    double normal() {
        const double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    // Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(values[i - 1], values[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}
}  // namespace detail

// FNV-1a, used to fold string identifiers into seed derivations.
inline std::uint64_t hash_tag(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

// Derives a child seed from a root seed and an ordered list of tags.
// Used to give every (dataset, oversampler, fold, repeat) cell its own
// independent stream regardless of scheduling order.
inline std::uint64_t derive_seed(std::uint64_t root,
                                 std::initializer_list<std::uint64_t> tags) {
    std::uint64_t state = root;
    std::uint64_t out = detail::splitmix64(state);
    for (std::uint64_t t : tags) {
        state ^= t + 0x9e3779b97f4a7c15ull + (state << 6) + (state >> 2);
        out = detail::splitmix64(state);
    }
    return out;
}

}  // namespace gsmote
