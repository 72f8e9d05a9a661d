#pragma once

#include <cstdint>
#include <random>

namespace certpri {

// 64-bit Mersenne Twister with distribution transforms written out here
// instead of taken from <random>, whose distributions are not specified
// bit-for-bit and differ between standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64() { return engine_(); }
    // [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    // (0, 1)
    double uniform_open();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    // Standard normal, Marsaglia polar method (spare value discarded).
    double normal();
    // Unit-rate exponential.
    double exponential();
    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

private:
    std::mt19937_64 engine_;
};

// SplitMix64 finalizer; used to spread nearby seeds before seeding.
std::uint64_t mix_seed(std::uint64_t seed);

}  // namespace certpri
