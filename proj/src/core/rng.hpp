#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace vcnn {

// Deterministic RNG. std::mt19937_64 output is fixed by the standard, and all
// value mappings below are explicit, so a fixed seed yields the same stream on
// every platform (std::uniform_*_distribution would not).
class Rng {
  public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1) with 53 bits of mantissa.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer on [0, n), n >= 1. Fixed-point multiply keeps the
    // mapping platform-independent.
    int64_t uniform_int(int64_t n) {
        return static_cast<int64_t>(
            (static_cast<unsigned __int128>(next_u64()) * static_cast<unsigned __int128>(n)) >> 64);
    }

    // Box-Muller; one value per call, deterministic for a fixed stream.
    double normal(double mean, double stddev) {
        double u1 = 1.0 - uniform();  // (0, 1]
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * r * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (int64_t i = static_cast<int64_t>(items.size()) - 1; i > 0; --i) {
            int64_t j = uniform_int(i + 1);
            std::swap(items[i], items[j]);
        }
    }

  private:
    std::mt19937_64 engine_;
};

inline uint64_t fnv1a(std::string_view text) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Named substream derivation: every stage of the pipeline draws from its own
// stream so stages stay independently reproducible under one --seed.
inline Rng substream(uint64_t seed, std::string_view name, uint64_t index = 0) {
    return Rng(splitmix64(seed ^ splitmix64(fnv1a(name) + index)));
}

}  // namespace vcnn
