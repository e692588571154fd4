#include "zoll/sampling.hpp"

#include "zoll/errors.hpp"

namespace zoll {
namespace {

PeriodicFunction random_function(Rng& rng, int n_modes) {
  std::normal_distribution<double> normal;
  PeriodicFunction u(n_modes);
  for (int j = 1; j <= n_modes; ++j) u.set(j, {normal(rng), normal(rng)});
  return u;
}

}  // namespace

TangentPair random_pair(Rng& rng, int n_modes, double norm, double s) {
  if (n_modes < 1) throw InvalidArgument("random_pair: n_modes must be positive");
  TangentPair t{random_function(rng, n_modes), random_function(rng, n_modes)};
  return (norm / sobolev_norm(t, s)) * t;
}

MagneticSystem random_system(Rng& rng, double a_star, int n_modes, double bound, double s) {
  std::uniform_real_distribution<double> unit(0.5, 1.0);
  const TangentPair t = random_pair(rng, n_modes, unit(rng) * bound, s);
  return MagneticSystem(a_star, t.alpha, t.beta);
}

PeriodicFunction random_gamma(Rng& rng, int K) {
  PeriodicFunction g = random_function(rng, K);
  return (1.0 / sobolev_norm(g, 0.0)) * g;
}

}  // namespace zoll
