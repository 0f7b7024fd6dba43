#pragma once

#include <cstdint>
#include <random>

namespace eslab {

// splitmix64 finalizer; used to derive statistically independent sub-seeds
// from a base seed plus stream identifiers.
inline std::uint64_t mix_seed(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    return mix_seed(mix_seed(base) ^ (0x6a09e667f3bcc909ULL + stream));
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream_a,
                                 std::uint64_t stream_b) {
    return derive_seed(derive_seed(base, stream_a), stream_b);
}

// Deterministic Gaussian stream. All stochastic components draw through this
// wrapper so that a (seed -> sample sequence) mapping is fixed for the
// lifetime of the codebase, independent of call sites.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

    double normal() { return normal_(engine_); }

    // Fills out with d independent standard normal draws.
    void normal_vector(std::size_t d, std::vector<double>& out) {
        out.resize(d);
        for (std::size_t i = 0; i < d; ++i) out[i] = normal_(engine_);
    }

    // Uniform integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n) {
        return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace eslab
