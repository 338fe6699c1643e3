#pragma once

#include <cstdint>
#include <random>

namespace ggbayes {

/// Seedable source of uniform and standard normal variates.
///
/// Streams are fully determined by the seed; the normal generator is the
/// Marsaglia polar method rather than std::normal_distribution so that draws
/// do not depend on the standard library implementation. An instance must not
/// be shared between threads.
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed) : engine_(seed), seed_(seed) {}

    /// Uniform variate in the open interval (0, 1).
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal();

    std::uint64_t seed() const { return seed_; }

private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// SplitMix64 finalizer; used to derive independent child seeds.
std::uint64_t mix_seed(std::uint64_t x);

/// Derives a child seed from a parent seed and a sequence of indices.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t a, std::uint64_t b = 0,
                          std::uint64_t c = 0);

/// Draw from gamma(shape, rate). Handles shape < 1 via a shape + 1 draw scaled
/// by U^(1/shape). May underflow to 0 for very small shapes; use
/// log_gamma_draw when the value feeds a power transform.
double gamma_draw(double shape, double rate, RandomSource& rng);

/// log of a gamma(shape, rate) draw, computed without underflow.
double log_gamma_draw(double shape, double rate, RandomSource& rng);

}  // namespace ggbayes
