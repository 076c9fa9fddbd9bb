#pragma once

#include <cstdint>

#include "lenscatter/hermite.hpp"

namespace lenscatter {

// unit_square: coefficients uniform in [0,1) + i[0,1).
// lambda_weighted: the same draw divided by m + d/2, so the expected squared
// Sigma^1 norm grows only logarithmically in the mode count.
enum class RandomKind { unit_square, lambda_weighted };

inline constexpr const char* kRngName = "mt19937_64";

// Deterministic per (kind, M, seed): mt19937_64 drives a fixed 53-bit
// uniform; draws are Re then Im, modes ascending.
SpectralField gen_random_state(RandomKind kind, int M, std::uint64_t seed,
                               int d = 1);

}  // namespace lenscatter
