#include "zoll/bessel.hpp"

#include <cmath>
#include <numbers>

#include "zoll/errors.hpp"

namespace zoll::bessel {
namespace {

constexpr double kSeriesLimit = 8.0;
constexpr double kMillerLimit = 25.0;

// Ascending series for x >= 0:
//   J1(x)   = sum (-1)^m (x/2)^(2m+1) / (m! (m+1)!)
// differentiated term by term. Accumulated in long double: near x = 8 the
// terms reach ~1e2 and the alternating sum would lose two digits in double.
BesselEval series(double x) {
  using real = long double;
  const real h = 0.5L * x;
  const real h2 = h * h;
  real j1v = 0.0L, j1p = 0.0L, j1pp = 0.0L;
  // c = (-1)^m / (m! (m+1)!), p = h^(2m), q = h^(2m-1) for m >= 1
  real c = 1.0L;
  real p = 1.0L;
  real q = h;
  for (int m = 0; m < 200; ++m) {
    const real tj1 = c * p * h;
    const real tj1p = 0.5L * (2 * m + 1) * c * p;
    // d/dx of (2m+1)/2 * h^(2m) = (2m+1)(2m)/4 * h^(2m-1)
    const real tj1pp = (m == 0) ? 0.0L : 0.25L * (2 * m + 1) * (2 * m) * c * q;
    j1v += tj1;
    j1p += tj1p;
    j1pp += tj1pp;
    if (m > h && std::abs(tj1p) < 1e-21L && std::abs(tj1pp) < 1e-21L && std::abs(tj1) < 1e-21L) {
      break;
    }
    c /= -static_cast<real>((m + 1) * (m + 2));
    p *= h2;
    if (m > 0) q *= h2;
  }
  return {x, static_cast<double>(j1v), static_cast<double>(j1p), static_cast<double>(j1pp)};
}

// Miller backward recurrence for J0(x), J1(x), x > 0 moderate.
void miller(double x, double& j0, double& j1v) {
  int n = 2 * (static_cast<int>(x) / 2) + 44;
  double next = 0.0;   // J_{k+1}
  double cur = 1e-30;  // J_k
  double norm = 0.0;   // J0 + 2 sum_{k>=1} J_{2k}
  double keep1 = 0.0;
  for (int k = n; k >= 1; --k) {
    if (k % 2 == 0) norm += 2.0 * cur;
    const double prev = (2.0 * k / x) * cur - next;
    next = cur;
    cur = prev;
    if (k == 1) keep1 = next;
    if (std::abs(cur) > 1e250) {
      cur *= 1e-250;
      next *= 1e-250;
      norm *= 1e-250;
      keep1 *= 1e-250;
    }
  }
  norm += cur;
  j0 = cur / norm;
  j1v = keep1 / norm;
}

// Hankel expansion J_nu(x) = sqrt(2/(pi x)) (P cos chi - Q sin chi), x >> 1.
// cos/sin of chi are passed in to avoid forming x - (nu/2+1/4) pi.
double hankel(int nu, double x, double cos_chi, double sin_chi) {
  const double mu = 4.0 * nu * nu;
  double p = 1.0;
  double q = 0.0;
  double term = 1.0;
  double last = 1.0;
  for (int k = 1; k < 100; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (k * 8.0 * x);
    const double mag = std::abs(term);
    if (mag > last) break;
    last = mag;
    // k odd contributes to Q, k even to P, with alternating signs per pair.
    switch (k % 4) {
      case 1: q += term; break;
      case 2: p -= term; break;
      case 3: q -= term; break;
      default: p += term; break;
    }
    if (mag < 1e-17) break;
  }
  return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * cos_chi - q * sin_chi);
}

void asymptotic(double x, double& j0, double& j1v) {
  const double c = std::cos(x);
  const double s = std::sin(x);
  constexpr double r = std::numbers::sqrt2 / 2.0;
  // chi0 = x - pi/4, chi1 = x - 3pi/4
  j0 = hankel(0, x, r * (c + s), r * (s - c));
  j1v = hankel(1, x, r * (s - c), -r * (s + c));
}

BesselEval positive(double x) {
  if (x <= kSeriesLimit) return series(x);
  double j0 = 0.0;
  double j1v = 0.0;
  if (x <= kMillerLimit) {
    miller(x, j0, j1v);
  } else {
    asymptotic(x, j0, j1v);
  }
  BesselEval out{x, j1v, j0 - j1v / x, 0.0};
  out.j1pp = -(x * out.j1p + (x * x - 1.0) * out.j1) / (x * x);
  return out;
}

void require_finite(double theta) {
  if (!std::isfinite(theta)) throw InvalidArgument("bessel: non-finite argument");
}

}  // namespace

BesselEval j1_derivs(double theta) {
  require_finite(theta);
  BesselEval out = positive(std::abs(theta));
  out.theta = theta;
  if (theta < 0.0) {
    // J1 and J1'' are odd, J1' is even.
    out.j1 = -out.j1;
    out.j1pp = -out.j1pp;
  }
  return out;
}

double j1(double theta) { return j1_derivs(theta).j1; }

double j1_pair_envelope(double theta) {
  const BesselEval e = j1_derivs(theta);
  return e.j1 * e.j1 + e.j1p * e.j1p;
}

}  // namespace zoll::bessel
