#pragma once

#include <cstdint>
#include <vector>

namespace agentopt {

// Counter-based seeded randomness. Every random decision is keyed by
// (seed, tag, indices...), so results do not depend on call order or
// thread scheduling. splitmix64 is the mixing core.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t key_mix(std::uint64_t a, std::uint64_t b) {
    return splitmix64(a ^ (splitmix64(b) + 0x9E3779B97F4A7C15ULL));
}

inline std::uint64_t key_mix(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return key_mix(key_mix(a, b), c);
}

inline std::uint64_t key_mix(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
    return key_mix(key_mix(a, b, c), d);
}

class Rng {
public:
    explicit Rng(std::uint64_t key) : state_(splitmix64(key)) {}

    std::uint64_t next() {
        state_ = splitmix64(state_);
        return state_;
    }

    // [0, 1)
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // [0, n), unbiased
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v = next();
        while (v >= limit) v = next();
        return v % n;
    }

    double uniform(double lo, double hi) { return lo + next_double() * (hi - lo); }

    bool bernoulli(double p) { return next_double() < p; }

private:
    std::uint64_t state_;
};

// Moves a uniformly random k-subset of `items` to the front, in random
// order (partial Fisher-Yates). k is clamped to items.size().
template <typename T>
void partial_shuffle(std::vector<T>& items, std::size_t k, Rng& rng) {
    if (k > items.size()) k = items.size();
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.below(items.size() - i));
        std::swap(items[i], items[j]);
    }
}

// Per-tag key namespaces for the library's random decisions.
namespace rng_tag {
inline constexpr std::uint64_t kSyntheticCell = 0x53594e43454c4cULL;   // synthetic cell draw
inline constexpr std::uint64_t kRandomSearch = 0x524e44534348ULL;
inline constexpr std::uint64_t kUcbRow = 0x554342524f57ULL;
inline constexpr std::uint64_t kWarmup = 0x5741524d5550ULL;
inline constexpr std::uint64_t kAlsMember = 0x414c534d454dULL;
inline constexpr std::uint64_t kAlsInit = 0x414c53494e49ULL;
inline constexpr std::uint64_t kAlsDropout = 0x414c5344524fULL;
inline constexpr std::uint64_t kHillStart = 0x48494c4c5354ULL;
inline constexpr std::uint64_t kBoInit = 0x424f494e4954ULL;
inline constexpr std::uint64_t kBoFallback = 0x424f46414c4cULL;
inline constexpr std::uint64_t kLmFallback = 0x4c4d46414c4cULL;
}  // namespace rng_tag

}  // namespace agentopt
