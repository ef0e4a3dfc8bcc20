#pragma once

// Deterministic random number utilities. All stochastic code in the toolkit
// draws from a GaussianSampler seeded through derive_seed, so that one master
// seed reproduces every run bit-exactly regardless of thread scheduling.

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace platesim {

// SplitMix64 finalizer; decorrelates nearby seed values.
inline std::uint64_t mix_seed(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Stable per-task seed from a master seed, a task tag, and an index.
// Parallel fan-out (sweep points, Monte Carlo repeats) must use this so that
// results do not depend on thread count or execution order.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                                 std::uint64_t index = 0) {
    std::uint64_t h = 1469598103934665603ULL; // FNV-1a offset basis
    for (char ch : tag) {
        h ^= static_cast<unsigned char>(ch);
        h *= 1099511628211ULL;
    }
    return mix_seed(master ^ mix_seed(h ^ mix_seed(index)));
}

// Standard-normal sampler: mt19937_64 + Box-Muller. The transform is spelled
// out (rather than std::normal_distribution) so the stream is identical
// across standard library implementations.
class GaussianSampler {
public:
    explicit GaussianSampler(std::uint64_t seed) : engine_(seed) {}

    double operator()() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        // u1 in (0,1], u2 in [0,1)
        const double u1 =
            (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.141592653589793238462643383279502884 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace platesim
