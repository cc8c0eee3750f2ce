#pragma once

#include <cstdint>
#include <random>

namespace mcao {

using Rng = std::mt19937_64;

// Independent stream for (seed, stream). Replica r of a run always uses
// make_rng(seed, r), so serial and parallel execution agree bit for bit.
Rng make_rng(std::uint64_t seed, std::uint64_t stream);

// Derive a child seed, e.g. for the per-step estimator runs.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

inline double uniform01(Rng& rng) {
    return std::generate_canonical<double, 64>(rng);
}

inline bool bernoulli(Rng& rng, double p) {
    return uniform01(rng) < p;
}

}  // namespace mcao
