#pragma once

#include <cstdint>
#include <vector>

#include "mcao/rng.hpp"

namespace mcao {

// Dependent rounding of z in [0,1]^N (the star case of GKPS): marginals are
// kept, sum Z <= ceil(sum z) on every path, and the coordinates are
// negatively correlated. Throws std::invalid_argument for weights outside [0,1].
std::vector<int> gkps_round(const std::vector<double>& z, Rng& rng);
std::vector<int> gkps_round(const std::vector<double>& z, std::uint64_t seed);

}  // namespace mcao
