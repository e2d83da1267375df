#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace rainsr {

/// Seeded random source with pinned draw rules, so any consumer of the same
/// seed regenerates identical streams regardless of standard-library
/// distribution internals. Generator algorithm: mt19937_64 (the name recorded
/// in manifests). Uniform doubles take the top 53 bits of one draw.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    static constexpr const char* kAlgorithm = "mt19937_64";

    uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform01() { return double(gen_() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer in [0, n), unbiased via rejection.
    uint64_t uniform_index(uint64_t n) {
        const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t draw;
        do {
            draw = gen_();
        } while (draw >= limit);
        return draw % n;
    }

    /// Fisher-Yates shuffle of 0..n-1.
    std::vector<size_t> permutation(size_t n) {
        std::vector<size_t> idx(n);
        for (size_t i = 0; i < n; ++i)
            idx[i] = i;
        for (size_t i = n; i > 1; --i) {
            size_t j = size_t(uniform_index(i));
            std::swap(idx[i - 1], idx[j]);
        }
        return idx;
    }

private:
    std::mt19937_64 gen_;
};

/// Derives an independent stream seed from a base seed and a stream index
/// (splitmix64 finalizer of the xor). Used for per-epoch shuffles.
inline uint64_t derive_seed(uint64_t seed, uint64_t stream) {
    uint64_t z = seed ^ (stream + 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace rainsr
