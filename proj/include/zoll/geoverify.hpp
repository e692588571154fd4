#pragma once

#include <span>
#include <vector>

#include "zoll/magsys.hpp"

namespace zoll {

/// Point of the unit tangent bundle in the chart (x, y, phi); all three lifted.
struct GeodesicState {
  double x = 0.0;
  double y = 0.0;
  double phi = 0.0;
};

struct FlowVector {
  double dx;
  double dy;
  double dphi;
};

/// x' = cos phi, y' = sin phi / A, phi' = -B'/A - (A'/A) sin phi.
FlowVector vector_field(const MagneticSystem& sys, const GeodesicState& s);

/// max over a grid in (x, phi) of phi'; negative in the perturbative regime.
double max_phi_rate(const MagneticSystem& sys, int grid = 128);

struct OrbitSample {
  double t;
  GeodesicState state;
  double I;
};

struct OrbitRecord {
  std::vector<OrbitSample> samples;  // accepted steps plus the end point (if recorded)
  double I_drift = 0.0;              // max |I(t) - I(0)|
  double closure_defect = 0.0;       // max over revolutions of the (x, phi) mismatch mod 2 pi
  double y_displacement = 0.0;       // y change per revolution of phi (raw orbit orientation)
  double period = 0.0;               // time of the last revolution end
};

/// Integrates the flow until phi has decreased by 2 pi * revolutions, with an
/// adaptive Dormand-Prince 5(4) scheme (absolute and relative tolerance tol)
/// and the revolution ends located on the dense output. Throws
/// FlowRegimeError if phi' >= 0 is met along the way.
OrbitRecord integrate_orbit(const MagneticSystem& sys, const GeodesicState& init,
                            int revolutions = 1, double tol = 1e-11, bool record = false);

/// Sign relating the raw y change per phi revolution to S'(I). The flow runs
/// with phi decreasing, which reverses the orientation of the level curve.
inline constexpr double kOrientation = -1.0;

/// Oriented displacement Delta(I) = kOrientation * (y change over one
/// revolution) of the orbit started on the level set I at angle phi0.
double displacement(const MagneticSystem& sys, double I, double phi0 = 0.0, double tol = 1e-11);

struct DisplacementCurve {
  std::vector<double> I;
  std::vector<double> delta;
  std::vector<double> seed_gap;  // |Delta(phi0 = 0) - Delta(phi0 = pi/2)| when two seeds are used
  std::vector<double> I_drift;
  std::vector<double> closure_defect;
};

DisplacementCurve displacement_curve(const MagneticSystem& sys, std::span<const double> levels,
                                     double tol = 1e-11, bool two_seeds = false);

/// Levels 2 pi n / n_I, n = 0..n_I-1.
std::vector<double> uniform_levels(int n_I);

struct DynamicalCertificate {
  bool zoll = false;
  int n_I = 0;
  double tol_dyn = 0.0;
  double max_abs_delta = 0.0;
  double worst_I = 0.0;
  double max_closure_defect = 0.0;
  double max_I_drift = 0.0;
  double mean_delta = 0.0;
  DisplacementCurve curve;
};

/// Passes iff max |Delta| < tol_dyn and every closure defect < tol_dyn over the
/// n_I uniform levels.
DynamicalCertificate zoll_verify(const MagneticSystem& sys, int n_I, double tol_dyn,
                                 double integ_tol = 1e-11);

/// Sign s such that s * (raw y change) matches S' from the direct action on
/// the system a = 0, b = 1e-3 cos x. Expected to equal kOrientation.
double calibrate_orientation(double a_star = 1.0);

}  // namespace zoll
