#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace resopt {

/// Deterministic random source shared by every sampler in the library.
///
/// Engine std::mt19937_64 with hand-written conversions (no <random>
/// distributions):
///   uniform01      = (engine() >> 11) * 2^-53            in [0, 1)
///   exponential(r) = -log1p(-uniform01()) / r            (inverse CDF)
///   categorical(w) = first k with (w_0 + ... + w_k) > u * sum(w)
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform01();
    double uniform(double lo, double hi);
    // +inf when rate == 0
    double exponential(double rate);
    std::size_t categorical(std::span<const double> weights);

private:
    std::mt19937_64 engine_;
};

// Stream seed for one consumer (switching path, initial states).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace resopt
