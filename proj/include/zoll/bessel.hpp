#pragma once

namespace zoll::bessel {

/// J1 together with its first two derivatives at one argument.
struct BesselEval {
  double theta = 0.0;
  double j1 = 0.0;
  double j1p = 0.0;
  double j1pp = 0.0;
};

/// First Bessel function J1(theta). Throws InvalidArgument on non-finite input.
double j1(double theta);

/// J1, J1' and J1'' at theta.
///
/// Three regimes are used: the ascending series (with term-wise derivatives)
/// for |theta| <= 8, Miller backward recurrence normalised by
/// J0 + 2 sum J_2k = 1 for 8 < |theta| <= 25, and the Hankel asymptotic
/// expansion beyond. Outside the series regime J1' = J0 - J1/theta and J1''
/// comes from the Bessel ODE.
BesselEval j1_derivs(double theta);

/// J1(theta)^2 + J1'(theta)^2, which never vanishes.
double j1_pair_envelope(double theta);

}  // namespace zoll::bessel
