#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "zoll/action.hpp"
#include "zoll/errors.hpp"
#include "zoll/linops.hpp"
#include "zoll/solver.hpp"

using namespace zoll;

namespace {

TangentPair scaled_kernel(double tau, int k = 1, double a_star = 1.0) {
  return tau * kernel_basis(a_star, k, 1.0);
}

}  // namespace

TEST_CASE("config validation") {
  SolveConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.grid() == 512);
  CHECK(cfg.modes() == 64);
  SolveConfig bad = cfg;
  bad.M = 100;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = cfg;
  bad.tol = 1e-13;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = cfg;
  bad.damping = 0.0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = cfg;
  bad.damping = 1.5;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  CHECK(std::string(to_string(SolveStatus::Stalled)) == "stalled");
}

TEST_CASE("trivial start needs no iteration") {
  const TangentPair zero{PeriodicFunction(0), PeriodicFunction(0)};
  const SolveResult r = newton_solve(1.0, zero, SolveConfig{});
  CHECK(r.report.converged);
  CHECK(r.report.iterations == 0);
  // The residual is the rounding-level action of the trivial system itself.
  CHECK(r.report.final_norm ==
        sobolev_norm(action_spectral(MagneticSystem::trivial(1.0), 32).s_fun, 3.0));
  CHECK(sobolev_norm(r.system.a(), r.system.b(), 0.0) == 0.0);
}

TEST_CASE("Newton from a kernel direction") {
  const SolveConfig cfg;
  const SolveResult r = newton_solve(1.0, scaled_kernel(0.02), cfg);
  REQUIRE(r.report.converged);
  CHECK(r.report.status == SolveStatus::Converged);
  CHECK(r.report.iterations <= 6);
  CHECK(r.report.final_norm < 1e-10);
  const ActionResult s = action_spectral(r.system, cfg.K);
  CHECK(is_zoll(s, 3.0, 1e-10).zoll);
  // Accepted residuals decrease strictly.
  for (std::size_t i = 1; i < r.report.iterates.size(); ++i) {
    CHECK(r.report.iterates[i] < r.report.iterates[i - 1]);
  }
  // The Newton step solves the linear model up to round-off.
  for (double ratio : r.report.linear_model_ratio) CHECK(ratio <= 1e-8);
  CHECK(r.report.superlinear_constant() < 1e4);
  CHECK(r.report.condition_numbers.size() == static_cast<std::size_t>(r.report.iterations));
  // Mode 0 is frozen.
  CHECK(r.system.a()[0] == cplx(0.0));
  CHECK(r.system.b()[0] == cplx(0.0));
}

TEST_CASE("Newton step on a randomly perturbed kernel start") {
  const SolveConfig cfg;
  TangentPair init = scaled_kernel(0.02);
  init.alpha = init.alpha.resized(2);
  init.beta = init.beta.resized(2);
  init.beta.set(2, cplx(1e-3, -2e-3));
  const SolveResult r = newton_solve(1.0, init, cfg);
  CHECK(r.report.converged);
  CHECK(r.report.final_norm < 1e-10);
}

TEST_CASE("non-kernel start converges to a Zoll system not tangent to it") {
  SolveConfig cfg;
  const double tau = 0.01;
  PeriodicFunction cosx(1);
  cosx.set(1, 0.5);
  const TangentPair dir{PeriodicFunction(1), cosx};
  CHECK(kernel_defect(1.0, dir, cfg.K) > 1e-2);
  const SolveResult r = newton_solve(1.0, tau * dir, cfg);
  REQUIRE(r.report.converged);
  const TangentPair moved{r.system.a() - tau * dir.alpha, r.system.b() - tau * dir.beta};
  CHECK(sobolev_norm(moved, 0.0) > 0.1 * tau * sobolev_norm(dir, 0.0));
}

TEST_CASE("large starts fail with a distinct status") {
  SolveConfig cfg;
  cfg.max_iter = 8;
  PeriodicFunction cosx(1);
  cosx.set(1, 0.5);
  const TangentPair dir{PeriodicFunction(1), cosx};
  const SolveResult r = newton_solve(1.0, 0.9 * dir, cfg);
  CHECK_FALSE(r.report.converged);
  CHECK(r.report.status != SolveStatus::Converged);
  CHECK_FALSE(r.report.message.empty());
}

TEST_CASE("iteration limit") {
  SolveConfig cfg;
  cfg.max_iter = 0;
  const SolveResult r = newton_solve(1.0, scaled_kernel(0.02), cfg);
  CHECK(r.report.status == SolveStatus::MaxIterations);
  CHECK(r.report.iterations == 0);
}

TEST_CASE("ill-conditioning limit") {
  SolveConfig cfg;
  cfg.max_condition = 2.0;
  const SolveResult r = newton_solve(1.0, scaled_kernel(0.02), cfg);
  CHECK(r.report.status == SolveStatus::IllConditioned);
  REQUIRE(r.report.condition_numbers.size() == 1);
  CHECK(r.report.condition_numbers[0] > 2.0);
}

TEST_CASE("residual floor is reported as stalled") {
  SolveConfig cfg;
  cfg.tol = 1e-12;
  cfg.s_residual = 6.0;
  const SolveResult r = newton_solve(1.0, scaled_kernel(0.02), cfg);
  CHECK(r.report.status == SolveStatus::Stalled);
  CHECK(r.report.final_norm < 1e-6);
  CHECK(r.report.final_norm > 1e-12);
}

TEST_CASE("Nash-Moser truncation") {
  SolveConfig cfg;
  cfg.nash_moser_n0 = 4;
  const SolveResult r = newton_solve(1.0, scaled_kernel(0.02), cfg);
  CHECK(r.report.converged);
  CHECK(r.report.final_norm < 1e-10);
}

TEST_CASE("determinism") {
  const SolveConfig cfg;
  const SolveResult a = newton_solve(1.0, scaled_kernel(0.02), cfg);
  const SolveResult b = newton_solve(1.0, scaled_kernel(0.02), cfg);
  CHECK(a.report.iterates == b.report.iterates);
  CHECK(oracle::coeff_distance(a.system.b(), b.system.b()) == 0.0);
}

TEST_CASE("tau schedules") {
  const std::vector<double> g = tau_schedule(0.02, 3, TauSpacing::Geometric);
  REQUIRE(g.size() == 3);
  CHECK(g[0] == doctest::Approx(0.005));
  CHECK(g[1] == doctest::Approx(0.01));
  CHECK(g[2] == doctest::Approx(0.02));
  const std::vector<double> l = tau_schedule(0.03, 3, TauSpacing::Linear);
  CHECK(l[0] == doctest::Approx(0.01));
  CHECK(l[2] == doctest::Approx(0.03));
  CHECK_THROWS_AS(tau_schedule(0.02, 0, TauSpacing::Linear), InvalidArgument);
}

TEST_CASE("continuation along a kernel direction") {
  const SolveConfig cfg;
  const TangentPair dir = kernel_basis(1.0, 1, 1.0);
  const ContinuationResult fam = continuation(1.0, dir, 0.02, 3, cfg);
  REQUIRE(fam.complete);
  REQUIRE(fam.members.size() == 3);
  CHECK(fam.tau_reached == doctest::Approx(0.02));
  for (std::size_t i = 1; i < fam.members.size(); ++i) {
    CHECK(fam.members[i].tangency_defect > fam.members[i - 1].tangency_defect);
  }
  CHECK(fam.tangency_slope > 0.0);
  CHECK(fam.tangency_intercept <= 1e-3);
  // Defect / tau roughly constant: linear decrease.
  const double r0 = fam.members[0].tangency_defect / fam.members[0].tau;
  const double r2 = fam.members[2].tangency_defect / fam.members[2].tau;
  CHECK(r2 / r0 == doctest::Approx(1.0).epsilon(0.2));

  // tau -> 0: the member approaches the trivial system.
  CHECK(sobolev_norm(fam.members[0].system.a(), fam.members[0].system.b(), 3.0) <
        sobolev_norm(fam.members[2].system.a(), fam.members[2].system.b(), 3.0));
}

TEST_CASE("tau and -tau give distinct systems") {
  const SolveConfig cfg;
  const std::vector<double> taus{-0.01, 0.01};
  const ContinuationResult fam = continuation(1.0, kernel_basis(1.0, 1, 1.0), taus, cfg);
  REQUIRE(fam.members.size() == 2);
  CHECK(oracle::coeff_distance(fam.members[0].system.b(), fam.members[1].system.b()) > 1e-3);
}

TEST_CASE("continuation rejects non-kernel directions") {
  PeriodicFunction cosx(1);
  cosx.set(1, 0.5);
  const TangentPair dir{PeriodicFunction(1), cosx};
  CHECK_THROWS_AS(continuation(1.0, dir, 0.02, 2, SolveConfig{}), InvalidArgument);
}

TEST_CASE("continuation truncates at the first failure") {
  SolveConfig cfg;
  cfg.max_iter = 6;
  const std::vector<double> taus{0.01, 0.7};
  const ContinuationResult fam = continuation(1.0, kernel_basis(1.0, 1, 1.0), taus, cfg);
  CHECK_FALSE(fam.complete);
  CHECK(fam.members.size() == 1);
  REQUIRE(fam.first_failed_tau.has_value());
  CHECK(*fam.first_failed_tau == doctest::Approx(0.7));
  CHECK_FALSE(fam.failure.empty());
}
