#pragma once

#include <cstdint>
#include <random>

namespace sastep {

using Rng = std::mt19937_64;

// Independent stream for one Monte-Carlo path.
Rng make_stream(std::uint64_t seed, std::uint64_t path_index);

// Standard normal draw via Box-Muller; unlike std::normal_distribution the
// sequence is fixed across standard library implementations.
double standard_normal(Rng& rng);

double uniform01(Rng& rng);

// Uniform integer in [0, n).
std::uint64_t uniform_index(Rng& rng, std::uint64_t n);

}  // namespace sastep
