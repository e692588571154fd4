#pragma once

#include <algorithm>
#include <limits>
#include <vector>

#include "zoll/spectral.hpp"

namespace zoll {

/// Pointwise data of a magnetic system at one x.
struct LocalGeometry {
  double A;   // A_* + a(x)
  double dA;  // a'(x)
  double B;   // lifted B(x) = x + b(x) + 2 pi n
  double dB;  // 1 + b'(x)
};

/// Magnetic system on the cylinder T x R with metric dx^2 + A(x)^2 dy^2 and
/// magnetic function f = B'/A, where A = A_* + a and B = id + b.
///
/// Construction checks A > 0 and B' > 0 on a fine grid. The lift of B is
/// fixed once: B_lift(x) = x + b(x) + 2 pi n with n chosen so that
/// B_lift(0) lies in [0, 2 pi). All first-integral values live on this lift.
class MagneticSystem {
 public:
  MagneticSystem(double a_star, PeriodicFunction a, PeriodicFunction b);

  static MagneticSystem trivial(double a_star);

  double a_star() const noexcept { return a_star_; }
  const PeriodicFunction& a() const noexcept { return a_; }
  const PeriodicFunction& b() const noexcept { return b_; }
  int max_mode() const noexcept { return std::max(a_.max_mode(), b_.max_mode()); }
  /// Integer n of the lift B_lift = x + b + 2 pi n.
  int lift_offset() const noexcept { return lift_offset_; }

  double a_of(double x) const;  // A(x)
  double b_of(double x) const;  // B_lift(x)
  double f_of(double x) const;  // B'(x)/A(x)
  LocalGeometry local(double x) const;

  /// (1/2pi) int A dx.
  double mean_radius() const noexcept { return a_star_ + a_[0].real(); }

  /// I(x, phi) = A(x) sin(phi) + B_lift(x).
  double first_integral(double x, double phi) const;

  /// Solves I(x, phi) = I for the lifted x. Safeguarded Newton with a
  /// bisection fallback; throws InvariantViolation if monotonicity fails.
  double invert_first_integral(double I, double phi) const;

  /// dx/dI = 1 / (A'(x) sin(phi) + B'(x)).
  double dx_dI(double x, double phi) const;

  /// min over x of B'(x) - |A'(x)|, i.e. the minimum of dI/dx over (x, phi),
  /// sampled on `grid` points (0 selects a default).
  double monotonicity_margin(int grid = 0) const;

  /// A, A', B_lift, B' sampled on the uniform grid of M nodes.
  std::vector<LocalGeometry> sample(int M) const;

 private:
  double a_star_;
  PeriodicFunction a_;
  PeriodicFunction b_;
  int lift_offset_ = 0;
  double margin_ = std::numeric_limits<double>::infinity();  // construction-grid margin
};

}  // namespace zoll
