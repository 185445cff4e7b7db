#pragma once

#include <cstdint>
#include <random>

namespace d2d {

// splitmix64 mixing step, used to turn seeds and substream labels into
// engine seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed of the (rep, stream) substream of a run seed. Replications draw from
// disjoint substreams so they can run in any order (or in parallel) and still
// produce identical realizations.
constexpr std::uint64_t substreamSeed(std::uint64_t seed, std::uint64_t rep,
                                      std::uint64_t stream) {
    std::uint64_t s = splitmix64(seed);
    s = splitmix64(s + 0x9e3779b97f4a7c15ULL * (rep + 1));
    return splitmix64(s + stream);
}

// Deterministic random source. Every random decision in the simulator flows
// through this class, so the seed plus the documented draw order of each
// sampler pins entire realizations bit-for-bit. Copyable; copies evolve
// independently.
class RandomSource {
public:
    RandomSource() : RandomSource(0) {}
    explicit RandomSource(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    static RandomSource substream(std::uint64_t seed, std::uint64_t rep,
                                  std::uint64_t stream) {
        return RandomSource(substreamSeed(seed, rep, stream));
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

    // Uniform index in {0, ..., n-1}; n must be positive.
    std::size_t uniformIndex(std::size_t n) {
        const auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
        return i < n ? i : n - 1;
    }

    bool coinFlip() { return (engine_() >> 63) != 0; }

    // Poisson count by Knuth's product method; one uniform per candidate
    // event. Means above 500 are split by superposition so the exp(-mean)
    // threshold stays representable.
    std::uint64_t poisson(double mean) {
        std::uint64_t total = 0;
        while (mean > 500.0) {
            total += poissonSmall(500.0);
            mean -= 500.0;
        }
        return total + poissonSmall(mean);
    }

private:
    std::uint64_t poissonSmall(double mean) {
        if (mean <= 0.0) return 0;
        const double limit = std::exp(-mean);
        std::uint64_t k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= uniform();
        } while (p > limit);
        return k - 1;
    }

    std::mt19937_64 engine_;
};

} // namespace d2d
