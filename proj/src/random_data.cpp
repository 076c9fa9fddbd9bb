#include "lenscatter/random_data.hpp"

#include <random>

namespace lenscatter {

namespace {

double uniform53(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1p-53;
}

}  // namespace

SpectralField gen_random_state(RandomKind kind, int M, std::uint64_t seed,
                               int d) {
  SpectralField f = zero_field(M);
  std::mt19937_64 rng(seed);
  for (int m = 0; m < M; ++m) {
    double re = uniform53(rng);
    double im = uniform53(rng);
    if (kind == RandomKind::lambda_weighted) {
      double lambda = 0.5 * d + m;
      re /= lambda;
      im /= lambda;
    }
    f.coeffs[m] = cplx(re, im);
  }
  return f;
}

}  // namespace lenscatter
