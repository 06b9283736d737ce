#pragma once

#include <cstdint>
#include <cstddef>
#include <vector>

namespace stroketree {

// SplitMix64 generator. The standard <random> engines are portable but the
// distributions are not; every sampled quantity in this library goes through
// this class so that a fixed seed yields byte-identical output everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [-1, 1).
    double next_signed() { return 2.0 * next_double() - 1.0; }

    /// Uniform integer in [0, n). Rejection sampling, no modulo bias.
    std::size_t next_index(std::size_t n) {
        if (n <= 1) return 0;
        const std::uint64_t bound = n;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return static_cast<std::size_t>(v % bound);
    }

    /// In-place Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = next_index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

    /// Independent generator for sub-stream `stream` of `seed`. Used so that
    /// parallel-safe per-tree / per-clip streams never depend on draw order.
    static Rng derive(std::uint64_t seed, std::uint64_t stream) {
        Rng r(seed + 0x9E3779B97F4A7C15ull * (stream + 1));
        r.next_u64();
        return r;
    }

private:
    std::uint64_t state_;
};

} // namespace stroketree
