#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace wellness {

// Seeded generator with portable sampling. std::mt19937_64 output is fixed by
// the standard, but the standard *distributions* are not, so uniform/normal
// are derived here directly from the raw 64-bit stream. Streams are therefore
// byte-reproducible across compilers and platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1), 53 mantissa bits.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n); n > 0. Modulo bias is irrelevant at the
    // ranges used here (n << 2^64).
    std::uint64_t uniform_index(std::uint64_t n) { return gen_() % n; }

    bool bernoulli(double p) { return uniform() < p; }

    // Box-Muller; one value per call, cache discarded for simpler replay.
    double normal(double mean = 0.0, double stddev = 1.0) {
        double u1 = uniform();
        const double u2 = uniform();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        constexpr double two_pi = 6.283185307179586476925286766559;
        return mean + stddev * r * std::cos(two_pi * u2);
    }

    // Derive an independent stream, e.g. one per person or per day, so that
    // adding a consumer does not shift everyone else's samples.
    Rng fork(std::uint64_t stream_id) {
        return Rng(mix(gen_() ^ mix(stream_id)));
    }

private:
    // SplitMix64 finalizer, used only for seed mixing.
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::mt19937_64 gen_;
};

} // namespace wellness
