#pragma once

#include <cmath>
#include <cstdint>

#include "invgae/tensor.hpp"

namespace invgae {

// Counter-based generator: the full state is (seed, counter), which is what
// checkpoints persist. Identical state always reproduces the identical
// stream; every draw advances the counter by a fixed amount.
struct RngState {
    std::uint64_t seed = 0;
    std::uint64_t counter = 0;

    std::uint64_t next_u64() {
        std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * ++counter;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // uniform in (0, 1]
    double next_uniform() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // uniform in [lo, hi)
    double next_uniform_in(double lo, double hi) {
        return lo + (hi - lo) * static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform integer in [0, n)
    std::uint64_t next_below(std::uint64_t n) {
        // multiply-shift; bias is negligible for the n used here (n << 2^64)
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    // Box-Muller, one variate per call (the sine companion is discarded so
    // the state stays a pure counter)
    double next_normal() {
        const double u1 = next_uniform();
        const double u2 = next_uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }
};

inline Tensor sample_standard_normal(int rows, int cols, RngState& rng) {
    Tensor t(rows, cols);
    double* d = t.data();
    for (std::size_t i = 0; i < t.size(); ++i) d[i] = rng.next_normal();
    return t;
}

}  // namespace invgae
