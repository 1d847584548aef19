#include "resopt/rng.hpp"

#include <cmath>
#include <limits>

namespace resopt {

double Rng::uniform01()
{
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi)
{
    return lo + (hi - lo) * uniform01();
}

double Rng::exponential(double rate)
{
    const double u = uniform01();
    if (rate <= 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return -std::log1p(-u) / rate;
}

std::size_t Rng::categorical(std::span<const double> weights)
{
    double total = 0.0;
    for (double w : weights) {
        total += w;
    }
    const double target = uniform01() * total;
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        if (weights[k] <= 0.0) {
            continue;
        }
        last_positive = k;
        acc += weights[k];
        if (acc > target) {
            return k;
        }
    }
    // rounding in the running sum can leave target == acc at the very end
    return last_positive;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream)
{
    // splitmix64 finaliser
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace resopt
