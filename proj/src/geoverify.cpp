#include "zoll/geoverify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "zoll/action.hpp"
#include "zoll/errors.hpp"

namespace zoll {
namespace {

namespace ode = boost::numeric::odeint;
using State = std::array<double, 3>;

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr long kMaxSteps = 2'000'000;
// Per-step error target relative to the requested tolerance. Lifted x and phi
// reach magnitudes of a few 2 pi, so the stepper runs tighter than tol to keep
// the first-integral drift within 10 tol.
constexpr double kStepTolFactor = 0.1;

double circle_distance(double u) { return std::abs(std::remainder(u, kTwoPi)); }

GeodesicState to_geo(const State& s) { return {s[0], s[1], s[2]}; }

}  // namespace

FlowVector vector_field(const MagneticSystem& sys, const GeodesicState& s) {
  const LocalGeometry g = sys.local(s.x);
  const double sp = std::sin(s.phi);
  return {std::cos(s.phi), sp / g.A, -g.dB / g.A - (g.dA / g.A) * sp};
}

double max_phi_rate(const MagneticSystem& sys, int grid) {
  double worst = -std::numeric_limits<double>::infinity();
  for (int m = 0; m < grid; ++m) {
    const LocalGeometry g = sys.local(kTwoPi * m / grid);
    // phi' = -(B' + A' sin phi)/A is maximal where A' sin phi = -|A'|.
    worst = std::max(worst, -(g.dB - std::abs(g.dA)) / g.A);
  }
  return worst;
}

OrbitRecord integrate_orbit(const MagneticSystem& sys, const GeodesicState& init, int revolutions,
                            double tol, bool record) {
  if (revolutions < 1) throw InvalidArgument("integrate_orbit: revolutions must be positive");
  if (!(tol > 0.0)) throw InvalidArgument("integrate_orbit: tol must be positive");

  auto rhs = [&sys](const State& s, State& ds, double /*t*/) {
    const FlowVector v = vector_field(sys, to_geo(s));
    ds = {v.dx, v.dy, v.dphi};
  };
  auto invariant = [&sys](const State& s) { return sys.first_integral(s[0], s[2]); };

  OrbitRecord rec;
  // y is integrated relative to init.y: the flow does not depend on y, and
  // this keeps step control (and hence the trajectory) translation invariant.
  const State s0{init.x, 0.0, init.phi};
  auto shifted = [&init](State s) {
    s[1] += init.y;
    return to_geo(s);
  };
  const double I0 = invariant(s0);
  if (record) rec.samples.push_back({0.0, init, I0});

  auto stepper = ode::make_dense_output(kStepTolFactor * tol, kStepTolFactor * tol, ode::runge_kutta_dopri5<State>());
  stepper.initialize(s0, 0.0, 1e-3);

  int done = 0;
  double target = init.phi - kTwoPi;
  double y_start = 0.0;
  double y_total = 0.0;
  for (long step = 0; done < revolutions; ++step) {
    if (step >= kMaxSteps) throw FlowRegimeError("integrate_orbit: step limit reached");
    const auto [t0, t1] = stepper.do_step(rhs);
    const State s1 = stepper.current_state();
    const double rate = vector_field(sys, to_geo(s1)).dphi;
    if (!(rate < 0.0)) {
      throw FlowRegimeError("integrate_orbit: phi' = " + std::to_string(rate) + " >= 0 at t = " +
                            std::to_string(t1) + " (outside the perturbative regime)");
    }
    rec.I_drift = std::max(rec.I_drift, std::abs(invariant(s1) - I0));
    if (record) rec.samples.push_back({t1, shifted(s1), invariant(s1)});

    while (done < revolutions && s1[2] <= target) {
      // phi is decreasing on [t0, t1]; bisect phi(t) = target on the dense output.
      double lo = t0;
      double hi = t1;
      State mid{};
      for (int it = 0; it < 200 && hi - lo > 4e-16 * (1.0 + std::abs(hi)); ++it) {
        const double tm = 0.5 * (lo + hi);
        stepper.calc_state(tm, mid);
        (mid[2] > target ? lo : hi) = tm;
      }
      const double te = 0.5 * (lo + hi);
      stepper.calc_state(te, mid);
      rec.I_drift = std::max(rec.I_drift, std::abs(invariant(mid) - I0));
      const double closure =
          std::hypot(circle_distance(mid[0] - init.x), circle_distance(mid[2] - target));
      rec.closure_defect = std::max(rec.closure_defect, closure);
      y_total += mid[1] - y_start;
      y_start = mid[1];
      rec.period = te;
      if (record && done + 1 == revolutions) rec.samples.push_back({te, shifted(mid), invariant(mid)});
      ++done;
      target -= kTwoPi;
    }
  }
  if (record) {
    // Drop accepted steps past the final event so the trace ends on it.
    while (rec.samples.size() > 1 && rec.samples[rec.samples.size() - 2].t > rec.period) {
      rec.samples.erase(rec.samples.end() - 2);
    }
  }
  rec.y_displacement = y_total / revolutions;
  return rec;
}

double displacement(const MagneticSystem& sys, double I, double phi0, double tol) {
  const double x0 = sys.invert_first_integral(I, phi0);
  return kOrientation * integrate_orbit(sys, {x0, 0.0, phi0}, 1, tol).y_displacement;
}

std::vector<double> uniform_levels(int n_I) {
  if (n_I < 1) throw InvalidArgument("uniform_levels: n_I must be positive");
  std::vector<double> levels(static_cast<std::size_t>(n_I));
  for (int n = 0; n < n_I; ++n) levels[n] = kTwoPi * n / n_I;
  return levels;
}

DisplacementCurve displacement_curve(const MagneticSystem& sys, std::span<const double> levels,
                                     double tol, bool two_seeds) {
  DisplacementCurve out;
  for (double I : levels) {
    const double x0 = sys.invert_first_integral(I, 0.0);
    const OrbitRecord rec = integrate_orbit(sys, {x0, 0.0, 0.0}, 1, tol);
    const double d = kOrientation * rec.y_displacement;
    double gap = 0.0;
    double drift = rec.I_drift;
    double closure = rec.closure_defect;
    if (two_seeds) {
      const double phi1 = 0.5 * std::numbers::pi;
      const double x1 = sys.invert_first_integral(I, phi1);
      const OrbitRecord r2 = integrate_orbit(sys, {x1, 0.0, phi1}, 1, tol);
      gap = std::abs(kOrientation * r2.y_displacement - d);
      drift = std::max(drift, r2.I_drift);
      closure = std::max(closure, r2.closure_defect);
    }
    out.I.push_back(I);
    out.delta.push_back(d);
    out.seed_gap.push_back(gap);
    out.I_drift.push_back(drift);
    out.closure_defect.push_back(closure);
  }
  return out;
}

DynamicalCertificate zoll_verify(const MagneticSystem& sys, int n_I, double tol_dyn,
                                 double integ_tol) {
  if (!(tol_dyn > 0.0)) throw InvalidArgument("zoll_verify: tol_dyn must be positive");
  DynamicalCertificate cert;
  cert.n_I = n_I;
  cert.tol_dyn = tol_dyn;
  const std::vector<double> levels = uniform_levels(n_I);
  cert.curve = displacement_curve(sys, levels, integ_tol);
  double sum = 0.0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const double d = cert.curve.delta[i];
    sum += d;
    if (std::abs(d) >= cert.max_abs_delta) {
      cert.max_abs_delta = std::abs(d);
      cert.worst_I = levels[i];
    }
    cert.max_closure_defect = std::max(cert.max_closure_defect, cert.curve.closure_defect[i]);
    cert.max_I_drift = std::max(cert.max_I_drift, cert.curve.I_drift[i]);
  }
  cert.mean_delta = sum / n_I;
  cert.zoll = cert.max_abs_delta < tol_dyn && cert.max_closure_defect < tol_dyn;
  return cert;
}

double calibrate_orientation(double a_star) {
  const double eps = 1e-3;
  const std::array<double, 1> c{eps};
  const std::array<double, 1> s{0.0};
  const MagneticSystem sys(a_star, PeriodicFunction(1), PeriodicFunction::from_trig(0.0, c, s));
  DirectActionOptions opts;
  opts.self_test = false;
  const ActionResult ref = action_direct(sys, 16, 256, 64, opts);
  double dot = 0.0;
  for (double I : uniform_levels(16)) {
    const double x0 = sys.invert_first_integral(I, 0.0);
    const double raw = integrate_orbit(sys, {x0, 0.0, 0.0}, 1, 1e-12).y_displacement;
    dot += raw * ref.delta.eval(I);
  }
  if (dot == 0.0) throw InvariantViolation("calibrate_orientation: degenerate calibration");
  return dot > 0.0 ? 1.0 : -1.0;
}

}  // namespace zoll
