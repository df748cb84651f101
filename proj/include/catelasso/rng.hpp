#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace catelasso {

/// Reproducible random stream.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. Distributions are implemented here instead of using
/// <random>'s, whose algorithms are implementation-defined, so the same
/// (seed, label) yields the same draws with any standard library.
class RngStream {
public:
    explicit RngStream(std::uint64_t engine_seed) : engine_(engine_seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via the Marsaglia polar method.
    double normal();

    bool bernoulli(double prob) { return uniform01() < prob; }

    /// Index drawn with probability proportional to weights[k].
    std::size_t categorical(std::span<const double> weights);

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Independent substream for (seed, label).
RngStream rng_stream(std::uint64_t seed, std::string_view label);

}  // namespace catelasso
