#pragma once

#include <cstdint>
#include <optional>
#include <random>

namespace actopo {

/// Portable random source: std::mt19937_64 (its output sequence is fixed by
/// the C++ standard) with the distribution transforms written out here, since
/// the standard library's distributions differ between implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_{seed} {}

    /// Independent stream for (seed, stream), e.g. one per class.
    static Rng derived(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next() { return engine_(); }
    /// [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    bool bernoulli(double p) { return uniform() < p; }
    /// Standard normal, Marsaglia polar method (pairs are cached).
    double normal();
    /// Knuth's product method below 10, Hormann's PTRS above.
    std::uint64_t poisson(double lambda);

  private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

}  // namespace actopo
