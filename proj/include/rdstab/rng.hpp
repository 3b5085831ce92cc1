#pragma once

#include <cstdint>
#include <random>

namespace rdstab {

// Seeded generator with an explicit 53-bit mapping to doubles, so sampled
// values are reproducible across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t bits() { return engine_(); }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return n ? bits() % n : 0; }

private:
    std::mt19937_64 engine_;
};

} // namespace rdstab
