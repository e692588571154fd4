#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>

#include "zoll/action.hpp"
#include "zoll/errors.hpp"
#include "zoll/geoverify.hpp"
#include "zoll/linops.hpp"
#include "zoll/sampling.hpp"
#include "zoll/solver.hpp"

using namespace zoll;
constexpr double kPi = std::numbers::pi;

namespace {

PeriodicFunction trig(double c1, double s1) {
  const std::array<double, 1> c{c1};
  const std::array<double, 1> s{s1};
  return PeriodicFunction::from_trig(0.0, c, s);
}

}  // namespace

TEST_CASE("vector field examples") {
  const FlowVector v1 = vector_field(MagneticSystem::trivial(1.0), {0.0, 0.0, 0.0});
  CHECK(v1.dx == 1.0);
  CHECK(v1.dy == 0.0);
  CHECK(v1.dphi == -1.0);
  const FlowVector v2 = vector_field(MagneticSystem::trivial(2.0), {0.0, 0.0, kPi / 2});
  CHECK(std::abs(v2.dx) < 1e-16);
  CHECK(v2.dy == 0.5);
  CHECK(v2.dphi == -0.5);
  Rng rng(51);
  CHECK(max_phi_rate(random_system(rng, 1.0, 4, 0.05)) < 0.0);
}

TEST_CASE("trivial orbit closes") {
  const OrbitRecord r = integrate_orbit(MagneticSystem::trivial(1.0), {0.0, 0.0, 0.0}, 1, 1e-11, true);
  CHECK(std::abs(r.y_displacement) < 1e-10);
  CHECK(r.closure_defect < 1e-10);
  CHECK(r.period == doctest::Approx(2.0 * kPi).epsilon(1e-10));
  // x = sin t, y = cos t - 1: an ellipse with semi-axes 1 and A_* = 1.
  for (const OrbitSample& s : r.samples) {
    CHECK(std::abs(s.state.x - std::sin(s.t)) < 1e-9);
    CHECK(std::abs(s.state.y - (std::cos(s.t) - 1.0)) < 1e-9);
  }
  CHECK(r.samples.back().t == doctest::Approx(r.period));

  const OrbitRecord e = integrate_orbit(MagneticSystem::trivial(2.0), {0.0, 0.0, 0.0}, 1, 1e-11, true);
  double ymin = 0.0;
  for (const OrbitSample& s : e.samples) ymin = std::min(ymin, s.state.y);
  // x = 2 sin(t/2), y = cos(t/2) - 1.
  CHECK(e.period == doctest::Approx(4.0 * kPi).epsilon(1e-10));
  CHECK(ymin == doctest::Approx(-2.0).epsilon(1e-3));
}

TEST_CASE("first-integral drift") {
  Rng rng(52);
  const MagneticSystem sys = random_system(rng, 1.0, 4, 0.05);
  double prev = 0.0;
  for (double tol : {1e-8, 1e-10, 1e-12}) {
    double drift = 0.0;
    for (double I : uniform_levels(8)) {
      const double x0 = sys.invert_first_integral(I, 0.3);
      drift = std::max(drift, integrate_orbit(sys, {x0, 0.0, 0.3}, 1, tol).I_drift);
    }
    CAPTURE(tol);
    CHECK(drift <= 10.0 * tol);
    if (prev > 0.0) {
      // Linear scaling: two decades in tol give about two decades in drift.
      const double decades = std::log10(prev / drift);
      CHECK(decades > 1.0);
      CHECK(decades < 3.0);
    }
    prev = drift;
  }
}

TEST_CASE("several revolutions") {
  Rng rng(53);
  const MagneticSystem sys = random_system(rng, 1.0, 4, 0.05);
  const double x0 = sys.invert_first_integral(1.0, 0.0);
  const OrbitRecord one = integrate_orbit(sys, {x0, 0.0, 0.0}, 1);
  const OrbitRecord three = integrate_orbit(sys, {x0, 0.0, 0.0}, 3);
  CHECK(three.y_displacement == doctest::Approx(one.y_displacement).epsilon(1e-6));
  CHECK(three.period == doctest::Approx(3.0 * one.period).epsilon(1e-9));
  CHECK(three.closure_defect < 1e-9);
  CHECK_THROWS_AS(integrate_orbit(sys, {x0, 0.0, 0.0}, 0), InvalidArgument);
}

TEST_CASE("vertical translation invariance") {
  Rng rng(54);
  const MagneticSystem sys = random_system(rng, 1.0, 4, 0.05);
  const double c = 3.25;
  const OrbitRecord a = integrate_orbit(sys, {0.4, 0.0, 1.0}, 1, 1e-11, true);
  const OrbitRecord b = integrate_orbit(sys, {0.4, c, 1.0}, 1, 1e-11, true);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    CHECK(a.samples[i].t == b.samples[i].t);
    CHECK(a.samples[i].state.x == b.samples[i].state.x);
    CHECK(b.samples[i].state.y - a.samples[i].state.y == doctest::Approx(c).epsilon(1e-14));
  }
}

TEST_CASE("non-Zoll system has a large displacement") {
  const MagneticSystem sys(1.0, PeriodicFunction(0), trig(0.1, 0.0));
  const DisplacementCurve c = displacement_curve(sys, uniform_levels(32));
  double worst = 0.0;
  for (double d : c.delta) worst = std::max(worst, std::abs(d));
  CHECK(worst > 1e-3);
}

TEST_CASE("displacement curve properties") {
  const DisplacementCurve t = displacement_curve(MagneticSystem::trivial(1.0), uniform_levels(16));
  for (double d : t.delta) CHECK(std::abs(d) < 1e-9);

  Rng rng(55);
  const double tol = 1e-11;
  for (int i = 0; i < 3; ++i) {
    const MagneticSystem sys = random_system(rng, 1.0, 4, 0.05);
    const DisplacementCurve c = displacement_curve(sys, uniform_levels(64), tol, true);
    double mean = 0.0;
    for (std::size_t n = 0; n < c.I.size(); ++n) {
      CHECK(c.seed_gap[n] <= 10.0 * tol);
      mean += c.delta[n];
    }
    CHECK(std::abs(mean / c.I.size()) < 1e-8);
    // Delta is 2 pi-periodic in the level.
    CHECK(displacement(sys, 1.0 + 2.0 * kPi) == doctest::Approx(displacement(sys, 1.0)).epsilon(1e-9));
  }
}

TEST_CASE("displacement matches the derivative of the direct action") {
  Rng rng(56);
  for (int i = 0; i < 3; ++i) {
    const MagneticSystem sys = random_system(rng, 1.0, 4, 0.05);
    const ActionResult d = action_direct(sys, 32, 256, 128);
    const DisplacementCurve c = displacement_curve(sys, uniform_levels(32));
    for (std::size_t n = 0; n < c.I.size(); ++n) {
      CHECK(std::abs(c.delta[n] - d.delta.eval(c.I[n])) <= 1e-6);
    }
  }
}

TEST_CASE("orientation calibration") {
  CHECK(calibrate_orientation(1.0) == kOrientation);
  CHECK(calibrate_orientation(0.7) == kOrientation);
}

TEST_CASE("zoll_verify") {
  const DynamicalCertificate t = zoll_verify(MagneticSystem::trivial(1.0), 16, 1e-9);
  CHECK(t.zoll);

  const TangentPair dir = kernel_basis(1.0, 1, 1.0);
  const SolveResult r = newton_solve(1.0, 0.02 * dir, SolveConfig{});
  REQUIRE(r.report.converged);
  const DynamicalCertificate c = zoll_verify(r.system, 32, 1e-6);
  CHECK(c.zoll);
  CHECK(c.max_I_drift < 1e-9);

  const MagneticSystem bad(1.0, PeriodicFunction(0), trig(0.05, 0.0));
  const DynamicalCertificate f = zoll_verify(bad, 32, 1e-6);
  CHECK_FALSE(f.zoll);
  CHECK(f.max_abs_delta > 1e-3);
  // Worst level sits at an extremum of Delta, where |Delta(worst)| is the max.
  CHECK(std::abs(displacement(bad, f.worst_I)) == doctest::Approx(f.max_abs_delta).epsilon(1e-8));
}

TEST_CASE("leaving the perturbative regime aborts the orbit") {
  // |A'| > B' somewhere, so phi' changes sign.
  const MagneticSystem sys(2.0, trig(0.0, 1.5), PeriodicFunction(0));
  CHECK(max_phi_rate(sys) > 0.0);
  CHECK_THROWS_AS(integrate_orbit(sys, {0.0, 0.0, -kPi / 2}, 1), FlowRegimeError);
}
