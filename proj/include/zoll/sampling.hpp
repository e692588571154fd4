#pragma once

#include <cstdint>
#include <random>

#include "zoll/linops.hpp"
#include "zoll/magsys.hpp"

namespace zoll {

/// Seeded generator for reproducible random test data.
using Rng = std::mt19937_64;

/// Random real pair on modes 1..n_modes (no mean), rescaled so that
/// |(alpha, beta)|_s equals `norm`.
TangentPair random_pair(Rng& rng, int n_modes, double norm, double s);

/// Random system A_* + a, id + b whose perturbation has |(a, b)|_s = u * bound
/// with u uniform in [0.5, 1].
MagneticSystem random_system(Rng& rng, double a_star, int n_modes, double bound, double s = 6.0);

/// Random real gamma with zero mean on modes 1..K, |gamma|_0 = 1.
PeriodicFunction random_gamma(Rng& rng, int K);

}  // namespace zoll
