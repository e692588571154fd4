#include "zoll/action.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "zoll/bessel.hpp"
#include "zoll/errors.hpp"

namespace zoll {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

PeriodicFunction spectral_coefficients(const MagneticSystem& sys, int K, int M) {
  const std::vector<LocalGeometry> geo = sys.sample(M);
  PeriodicFunction s(K);
  for (int k = 1; k <= K; ++k) {
    cplx acc{};
    for (const LocalGeometry& g : geo) {
      acc += bessel::j1(k * g.A) * std::polar(1.0, -k * g.B);
    }
    s.set(k, acc * (kTwoPi / M) / static_cast<double>(k));
  }
  return s;
}

double max_coefficient_change(const PeriodicFunction& u, const PeriodicFunction& v) {
  double change = 0.0;
  const int n = std::max(u.max_mode(), v.max_mode());
  for (int j = 0; j <= n; ++j) change = std::max(change, std::abs(u[j] - v[j]));
  return change;
}

}  // namespace

void finalize_action(ActionResult& result) {
  result.s_fun.set(0, 0.0);
  result.delta = derivative(result.s_fun);
  result.residual_norms.clear();
  for (double s : {0.0, 3.0, 6.0}) result.residual_norms[s] = sobolev_norm(result.s_fun, s);
}

ActionResult action_spectral(const MagneticSystem& sys, int K, SpectralActionOptions opts) {
  if (K < 1) throw InvalidArgument("action_spectral: K must be positive");
  const int M = opts.grid > 0 ? opts.grid : 16 * K;
  if (M < 16 * K) throw InvalidArgument("action_spectral: grid must have at least 16 K nodes");
  ActionResult result;
  result.s_fun = spectral_coefficients(sys, K, M);
  if (opts.self_test) {
    const PeriodicFunction fine = spectral_coefficients(sys, K, 2 * M);
    result.self_test_change = max_coefficient_change(result.s_fun, fine);
    if (result.self_test_change > opts.self_test_tol) {
      throw ResolutionError("action_spectral: doubling the grid changed S by " +
                            std::to_string(result.self_test_change));
    }
  }
  finalize_action(result);
  return result;
}

double action_direct_at(const MagneticSystem& sys, double I, int n_phi) {
  double acc = 0.0;
  for (int m = 0; m < n_phi; ++m) {
    const double phi = kTwoPi * m / n_phi;
    const double sp = std::sin(phi);
    const double cp = std::cos(phi);
    const double x = sys.invert_first_integral(I, phi);
    const LocalGeometry g = sys.local(x);
    acc += cp * cp * g.A / (g.dA * sp + g.dB);
  }
  return kTwoPi * acc / n_phi - kPi * sys.mean_radius();
}

namespace {

PeriodicFunction direct_coefficients(const MagneticSystem& sys, int K, int n_phi, int n_I) {
  GridFunction g{std::vector<double>(static_cast<std::size_t>(n_I))};
  for (int n = 0; n < n_I; ++n) g.samples[n] = action_direct_at(sys, kTwoPi * n / n_I, n_phi);
  return zero_mean(from_grid(g, K));
}

}  // namespace

ActionResult action_direct(const MagneticSystem& sys, int K, int n_phi, int n_I,
                           DirectActionOptions opts) {
  if (K < 1) throw InvalidArgument("action_direct: K must be positive");
  if (n_I < 2 * K + 1) throw InvalidArgument("action_direct: n_I must be at least 2K+1");
  if (n_phi < 8) throw InvalidArgument("action_direct: n_phi too small");
  ActionResult result;
  result.s_fun = direct_coefficients(sys, K, n_phi, n_I);
  if (opts.self_test) {
    const PeriodicFunction fine = direct_coefficients(sys, K, 2 * n_phi, n_I);
    result.self_test_change = max_coefficient_change(result.s_fun, fine);
    if (result.self_test_change > opts.self_test_tol) {
      throw ResolutionError("action_direct: doubling n_phi changed S by " +
                            std::to_string(result.self_test_change));
    }
  }
  finalize_action(result);
  return result;
}

ZollCertificate is_zoll(const ActionResult& result, double s, double tol) {
  ZollCertificate cert;
  cert.s = s;
  cert.tol = tol;
  cert.norm = sobolev_norm(result.s_fun, s);
  const auto [mode, mag] = largest_coefficient(result.s_fun);
  cert.worst_mode = mode;
  cert.worst_abs = mag;
  cert.zoll = cert.norm < tol;
  return cert;
}

}  // namespace zoll
