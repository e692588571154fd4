#include "zoll/magsys.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "zoll/errors.hpp"

namespace zoll {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int check_grid(int max_mode) { return std::max(256, 16 * max_mode); }

}  // namespace

MagneticSystem::MagneticSystem(double a_star, PeriodicFunction a, PeriodicFunction b)
    : a_star_(a_star), a_(std::move(a)), b_(std::move(b)) {
  if (!(a_star > 0.0) || !std::isfinite(a_star)) {
    throw InvalidArgument("MagneticSystem: A_* must be positive and finite");
  }
  lift_offset_ = -static_cast<int>(std::floor(b_.eval(0.0) / kTwoPi));
  const int M = check_grid(max_mode());
  for (int m = 0; m < M; ++m) {
    const double x = kTwoPi * m / M;
    const LocalGeometry g = local(x);
    if (!(g.A > 0.0)) {
      throw InvariantViolation("MagneticSystem: A(x) <= 0 at x = " + std::to_string(x));
    }
    if (!(g.dB > 0.0)) {
      throw InvariantViolation("MagneticSystem: B'(x) <= 0 at x = " + std::to_string(x));
    }
    margin_ = std::min(margin_, g.dB - std::abs(g.dA));
  }
}

MagneticSystem MagneticSystem::trivial(double a_star) {
  return MagneticSystem(a_star, PeriodicFunction(0), PeriodicFunction(0));
}

LocalGeometry MagneticSystem::local(double x) const {
  const auto [av, ad] = a_.eval_with_derivative(x);
  const auto [bv, bd] = b_.eval_with_derivative(x);
  return {a_star_ + av, ad, x + bv + kTwoPi * lift_offset_, 1.0 + bd};
}

double MagneticSystem::a_of(double x) const { return a_star_ + a_.eval(x); }

double MagneticSystem::b_of(double x) const { return x + b_.eval(x) + kTwoPi * lift_offset_; }

double MagneticSystem::f_of(double x) const {
  const LocalGeometry g = local(x);
  return g.dB / g.A;
}

double MagneticSystem::first_integral(double x, double phi) const {
  return a_of(x) * std::sin(phi) + b_of(x);
}

double MagneticSystem::dx_dI(double x, double phi) const {
  const LocalGeometry g = local(x);
  return 1.0 / (g.dA * std::sin(phi) + g.dB);
}

double MagneticSystem::invert_first_integral(double I, double phi) const {
  if (!std::isfinite(I) || !std::isfinite(phi)) {
    throw InvalidArgument("invert_first_integral: non-finite input");
  }
  const double s = std::sin(phi);
  if (!(margin_ > 0.0)) {
    // Outside the uniformly monotone regime: check this angle explicitly.
    const int M = 4 * check_grid(max_mode());
    for (int m = 0; m < M; ++m) {
      const LocalGeometry g = local(kTwoPi * m / M);
      if (!(g.dA * s + g.dB > 0.0)) {
        throw InvariantViolation("invert_first_integral: dI/dx <= 0 at x = " +
                                 std::to_string(kTwoPi * m / M) + " (perturbative regime left)");
      }
    }
  }
  auto residual = [&](double x, double& slope) {
    const LocalGeometry g = local(x);
    slope = g.dA * s + g.dB;
    return g.A * s + g.B - I;
  };

  double x = I - a_star_ * s - kTwoPi * lift_offset_;
  double slope = 0.0;
  double r = residual(x, slope);
  if (r == 0.0) return x;

  // Bracket: the residual minus x is bounded and 2pi-quasi-periodic, so
  // stepping away from the trivial guess finds a sign change quickly.
  double lo = x;
  double hi = x;
  double r_lo = r;
  double r_hi = r;
  double step = 0.5;
  for (int i = 0; i < 60 && r_lo * r_hi > 0.0; ++i) {
    double dummy = 0.0;
    if (r > 0.0) {
      lo -= step;
      r_lo = residual(lo, dummy);
    } else {
      hi += step;
      r_hi = residual(hi, dummy);
    }
    step *= 2.0;
  }
  if (r_lo * r_hi > 0.0) {
    throw InvariantViolation("invert_first_integral: failed to bracket the level set");
  }
  if (r_lo > 0.0 || r_hi < 0.0) {
    throw InvariantViolation("invert_first_integral: first integral not increasing in x");
  }

  for (int it = 0; it < 200; ++it) {
    if (!(slope > 0.0)) {
      throw InvariantViolation("invert_first_integral: dI/dx <= 0 (perturbative regime left)");
    }
    double next = x - r / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double dx = next - x;
    x = next;
    r = residual(x, slope);
    if (r > 0.0) {
      hi = x;
    } else if (r < 0.0) {
      lo = x;
    } else {
      return x;
    }
    if (std::abs(dx) <= 1e-15 * (1.0 + std::abs(x)) || hi - lo <= 1e-15 * (1.0 + std::abs(x))) {
      break;
    }
  }
  // One last Newton correction to land on round-off.
  if (slope > 0.0) x -= r / slope;
  return x;
}

double MagneticSystem::monotonicity_margin(int grid) const {
  const int M = grid > 0 ? grid : 4 * check_grid(max_mode());
  double margin = std::numeric_limits<double>::infinity();
  for (int m = 0; m < M; ++m) {
    const LocalGeometry g = local(kTwoPi * m / M);
    margin = std::min(margin, g.dB - std::abs(g.dA));
  }
  return margin;
}

std::vector<LocalGeometry> MagneticSystem::sample(int M) const {
  std::vector<LocalGeometry> out;
  out.reserve(static_cast<std::size_t>(M));
  for (int m = 0; m < M; ++m) out.push_back(local(kTwoPi * m / M));
  return out;
}

}  // namespace zoll
