#include "sastep/random.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace sastep {

Rng make_stream(std::uint64_t seed, std::uint64_t path_index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(path_index),
                      static_cast<std::uint32_t>(path_index >> 32), 0x5a5eu};
    return Rng(seq);
}

double uniform01(Rng& rng) {
    // 53 random bits, strictly inside (0, 1).
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

double standard_normal(Rng& rng) {
    const double u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index: empty range");
    // Rejection keeps the draw unbiased; std::uniform_int_distribution is not portable.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

}  // namespace sastep
