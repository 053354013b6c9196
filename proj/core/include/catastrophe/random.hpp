#pragma once

#include <cstdint>
#include <random>

namespace catastrophe {

/// A reproducible random stream keyed by (seed, stream index).
///
/// The key is expanded through std::seed_seq into a 64-bit Mersenne Twister,
/// both of which are fully specified by the standard, so a given key yields
/// the same draws on every conforming toolchain. Replica i of an ensemble
/// uses stream index i; streams with distinct keys are treated as
/// independent.
///
/// Bounded integers and exponentials are derived here rather than through
/// the <random> distributions, whose algorithms are implementation-defined.
class RandomStream {
  public:
    using result_type = std::uint64_t;

    explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0);

    static constexpr result_type min() { return std::mt19937_64::min(); }
    static constexpr result_type max() { return std::mt19937_64::max(); }
    result_type operator()() { return engine_(); }

    /// Uniform on (0, 1], 53 bits.
    double uniform_open0() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }

    /// Uniform on [0, 1), 53 bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Unbiased uniform draw on {0, ..., bound-1}; bound must be >= 1.
    /// Multiply-shift with rejection of the short first interval.
    std::uint64_t below(std::uint64_t bound);

    /// Exponential variate with the given rate (> 0).
    double exponential(double rate);

    bool bernoulli(double p) { return uniform01() < p; }

  private:
    std::mt19937_64 engine_;
};

}  // namespace catastrophe
