#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "zoll/action.hpp"
#include "zoll/bessel.hpp"
#include "zoll/errors.hpp"
#include "zoll/linops.hpp"
#include "zoll/sampling.hpp"

using namespace zoll;
constexpr double kPi = std::numbers::pi;
constexpr int K = 16;

namespace {

PeriodicFunction S(const MagneticSystem& sys) {
  SpectralActionOptions opts;
  opts.self_test = false;
  return action_spectral(sys, K, opts).s_fun;
}

double rel(const PeriodicFunction& got, const PeriodicFunction& want) {
  return sobolev_norm(got - want, 0.0) / sobolev_norm(want, 0.0);
}

PeriodicFunction unit_mode(int j, cplx c = 1.0) {
  PeriodicFunction u(std::abs(j));
  u.set(j, c);
  return u;
}

}  // namespace

TEST_CASE("dS at the trivial system") {
  const double a_star = 1.3;
  const MagneticSystem t = MagneticSystem::trivial(a_star);
  Rng rng(31);
  const TangentPair p = random_pair(rng, 8, 1.0, 0.0);
  const PeriodicFunction g = apply_dS(t, p, K);
  for (int k = 1; k <= K; ++k) {
    const bessel::BesselEval e = bessel::j1_derivs(k * a_star);
    const cplx want = 2.0 * kPi * (e.j1p * p.alpha[k] - cplx(0.0, 1.0) * e.j1 * p.beta[k]);
    CHECK(std::abs(g[k] - want) < 1e-13);
  }
  CHECK(g[0] == cplx(0.0));
}

TEST_CASE("dS agrees with central differences of S") {
  Rng rng(32);
  for (int i = 0; i < 10; ++i) {
    const MagneticSystem sys = random_system(rng, 1.0, 4, 0.05);
    const TangentPair t = random_pair(rng, 6, 1.0, 0.0);
    const double eps = 1e-5;
    const PeriodicFunction fd =
        (1.0 / (2 * eps)) * (S(oracle::shifted(sys, t, eps)) - S(oracle::shifted(sys, t, -eps)));
    CHECK(rel(apply_dS(sys, t, K), fd) <= 1e-5);
  }
}

TEST_CASE("d2S properties") {
  Rng rng(33);
  const MagneticSystem sys = random_system(rng, 1.0, 4, 0.05);
  const TangentPair t1 = random_pair(rng, 5, 1.0, 0.0);
  const TangentPair t2 = random_pair(rng, 5, 1.0, 0.0);
  const Linearization lin(sys, K);
  CHECK(oracle::coeff_distance(lin.apply_d2S(t1, t2), lin.apply_d2S(t2, t1)) < 1e-12);
  const TangentPair zero{PeriodicFunction(0), PeriodicFunction(0)};
  CHECK(lin.apply_d2S(t1, zero).is_zero());

  const double eps = 1e-5;
  const PeriodicFunction fd = (1.0 / (2 * eps)) * (apply_dS(oracle::shifted(sys, t2, eps), t1, K) -
                                                   apply_dS(oracle::shifted(sys, t2, -eps), t1, K));
  CHECK(rel(lin.apply_d2S(t1, t2), fd) <= 1e-4);
}

TEST_CASE("d2S at the trivial system matches the second difference of S") {
  const MagneticSystem t = MagneticSystem::trivial(1.0);
  for (int j : {1, 2, 3}) {
    const TangentPair p{unit_mode(j, {0.3, 0.1}), unit_mode(j, {-0.2, 0.4})};
    const double h = 1e-4;
    const PeriodicFunction fd = (1.0 / (h * h)) * (S(oracle::shifted(t, p, h)) - 2.0 * S(t) +
                                                   S(oracle::shifted(t, p, -h)));
    CHECK(oracle::coeff_distance(apply_d2S(t, p, p, K), fd) < 1e-6);
  }
}

TEST_CASE("Taylor remainder is third order") {
  Rng rng(34);
  const MagneticSystem sys = random_system(rng, 1.0, 3, 0.05);
  const TangentPair t = random_pair(rng, 4, 1.0, 0.0);
  const Linearization lin(sys, K);
  const PeriodicFunction s0 = S(sys);
  const PeriodicFunction d1 = lin.apply_dS(t);
  const PeriodicFunction d2 = lin.apply_d2S(t, t);
  std::vector<double> r;
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    const PeriodicFunction model = s0 + eps * d1 + (0.5 * eps * eps) * d2;
    r.push_back(sobolev_norm(S(oracle::shifted(sys, t, eps)) - model, 0.0));
  }
  const double slope = std::log10(r[0] / r[1]);
  CHECK(slope > 2.7);
  CHECK(slope < 3.3);
  CHECK(r[2] < r[1]);
}

TEST_CASE("adjoint identity") {
  Rng rng(35);
  for (int i = 0; i < 10; ++i) {
    const MagneticSystem sys = random_system(rng, 0.9 + 0.1 * i, 4, 0.05);
    const TangentPair t = random_pair(rng, 2 * K, 1.0, 0.0);
    const PeriodicFunction g = random_gamma(rng, K);
    const Linearization lin(sys, K);
    const cplx lhs = inner_product(lin.apply_dS(t), g);
    const cplx rhs = inner_product(t, lin.apply_dS_adjoint(g));
    CHECK(std::abs(lhs - rhs) <= 1e-9 * std::abs(lhs));
  }
}

TEST_CASE("adjoint examples") {
  const double a_star = 1.0;
  const MagneticSystem t = MagneticSystem::trivial(a_star);
  for (int j : {1, 4}) {
    const TangentPair p = apply_dS_adjoint(t, unit_mode(j), K);
    const bessel::BesselEval e = bessel::j1_derivs(j * a_star);
    CHECK(std::abs(p.alpha[j] - 2.0 * kPi * e.j1p) < 1e-13);
    CHECK(std::abs(p.beta[j] - cplx(0.0, 2.0 * kPi * e.j1)) < 1e-13);
    for (int m = 0; m <= 2 * K; ++m) {
      if (m == j) continue;
      CHECK(std::abs(p.alpha[m]) < 1e-13);
      CHECK(std::abs(p.beta[m]) < 1e-13);
    }
  }
  const TangentPair z = apply_dS_adjoint(t, PeriodicFunction(K), K);
  CHECK(z.alpha.is_zero());
  CHECK(z.beta.is_zero());
}

TEST_CASE("normal operator structure") {
  Rng rng(36);
  const MagneticSystem sys = random_system(rng, 1.0, 4, 0.05);
  const Linearization lin(sys, K);
  const SpectralOperator M = lin.assemble_M();
  REQUIRE(M.entries.rows() == 2 * K);
  CHECK(M.hermitian_defect() < 1e-10);
  CHECK(M.reality_defect() < 1e-10);
  // Entry (k, j) equals (dS dS^* e_j, e_k).
  double worst = 0.0;
  for (int j : {-K, -3, -1, 1, 2, 7, K}) {
    const PeriodicFunction col = lin.apply_dS(lin.apply_dS_adjoint(unit_mode(j)));
    // A real gamma is needed for dS^*; e_j + e_{-j} and i(e_j - e_{-j}) split the pair.
    const PeriodicFunction col_i = lin.apply_dS(lin.apply_dS_adjoint(unit_mode(j, {0.0, 1.0})));
    for (int k : nonzero_modes(K)) {
      const cplx from_pair = 0.5 * (col[k] - cplx(0.0, 1.0) * col_i[k]);
      worst = std::max(worst, std::abs(from_pair - M.entries(M.row_index(k), M.col_index(j))));
    }
  }
  CHECK(worst < 1e-9);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M.entries);
  CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("trivial normal operator is diagonal") {
  for (double a_star : {0.7, 1.0, 2.0}) {
    const SpectralOperator M = assemble_M(MagneticSystem::trivial(a_star), K);
    for (int k : nonzero_modes(K)) {
      for (int j : nonzero_modes(K)) {
        const cplx v = M.entries(M.row_index(k), M.col_index(j));
        if (j == k) {
          const double want = 4.0 * kPi * kPi * bessel::j1_pair_envelope(j * a_star);
          CHECK(std::abs(v - want) < 1e-10);
        } else {
          CHECK(std::abs(v) < 1e-10);
        }
      }
    }
  }
  const oracle::Bessel q = oracle::bessel_quadrature(1.0);
  const SpectralOperator M1 = assemble_M(MagneticSystem::trivial(1.0), 4);
  CHECK(M1.entries(M1.row_index(1), M1.col_index(1)).real() ==
        doctest::Approx(4.0 * kPi * kPi * (q.j1 * q.j1 + q.j1p * q.j1p)).epsilon(1e-12));
}

TEST_CASE("diagonal scaling of M") {
  Rng rng(37);
  const MagneticSystem sys = random_system(rng, 1.0, 4, 0.05);
  const SpectralOperator M = assemble_M(sys, 32);
  const double slope = diagonal_slope(M, 8, 32);
  CHECK(slope >= -1.2);
  CHECK(slope <= -0.8);
}

TEST_CASE("kernel basis") {
  const TangentPair p = kernel_basis(1.0, 1, 1.0);
  CHECK(sobolev_norm(apply_dS(MagneticSystem::trivial(1.0), p, K), 0.0) < 1e-10);
  CHECK(sobolev_norm(p, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(sobolev_norm(kernel_basis(1.0, 2, 0.3), 0.0) == doctest::Approx(0.3).epsilon(1e-14));

  // A_* at the first zero of J1: alpha vanishes, beta does not.
  const double z = 3.8317059702075125;
  const TangentPair q = kernel_basis(z, 1, 1.0);
  CHECK(std::abs(q.alpha[1]) < 1e-15);
  CHECK(std::abs(q.beta[1]) > 0.5);
  const TangentPair r = kernel_basis(1.0, 3, 1.0);
  CHECK(sobolev_norm(apply_dS(MagneticSystem::trivial(1.0), r, K), 0.0) < 1e-10);
  CHECK(std::abs(inner_product(p, r)) == 0.0);
  CHECK_THROWS_AS(kernel_basis(1.0, 0, 1.0), InvalidArgument);
}

TEST_CASE("right inverse at the trivial system") {
  const double a_star = 1.0;
  const MagneticSystem t = MagneticSystem::trivial(a_star);
  Rng rng(38);
  const PeriodicFunction g = random_gamma(rng, K);
  const TangentPair r = right_inverse_apply(t, g, K);
  for (int j = 1; j <= K; ++j) {
    const bessel::BesselEval e = bessel::j1_derivs(j * a_star);
    const double E = e.j1 * e.j1 + e.j1p * e.j1p;
    CHECK(std::abs(r.alpha[j] - e.j1p * g[j] / (2.0 * kPi * E)) < 1e-12);
    CHECK(std::abs(r.beta[j] - cplx(0.0, 1.0) * e.j1 * g[j] / (2.0 * kPi * E)) < 1e-12);
  }
  const TangentPair z = right_inverse_apply(t, PeriodicFunction(K), K);
  CHECK(sobolev_norm(z, 0.0) == 0.0);
}

TEST_CASE("right-inverse property") {
  Rng rng(39);
  for (int i = 0; i < 10; ++i) {
    const MagneticSystem sys = random_system(rng, 1.0, 4, 0.05);
    const Linearization lin(sys, K);
    const RightInverse R(lin);
    const PeriodicFunction g = random_gamma(rng, K);
    const TangentPair r = R.apply(g);
    CHECK(sobolev_norm(lin.apply_dS(r) - g, 0.0) <= 1e-8);
    CHECK(r.alpha[0] == cplx(0.0));
    CHECK(r.beta[0] == cplx(0.0));
    // Round trip through the image of dS.
    const TangentPair t = random_pair(rng, 6, 1.0, 0.0);
    const PeriodicFunction gt = lin.apply_dS(t);
    CHECK(sobolev_norm(lin.apply_dS(R.apply(gt)) - gt, 0.0) <= 1e-8 * sobolev_norm(gt, 0.0));
    CHECK(R.condition_number() < 1e3);
    CHECK(R.min_eigenvalue() > 0.0);
  }
}

TEST_CASE("ill-conditioning is reported") {
  const Linearization lin(MagneticSystem::trivial(1.0), K);
  CHECK_THROWS_AS(RightInverse(lin, 2.0), SingularOperator);
  try {
    RightInverse bad(lin, 2.0);
  } catch (const SingularOperator& e) {
    CHECK(e.condition() > 2.0);
  }
}

TEST_CASE("dS matrix matches apply_dS") {
  Rng rng(40);
  const MagneticSystem sys = random_system(rng, 1.0, 3, 0.05);
  const Linearization lin(sys, 4, {0, 6});
  const SpectralOperator D = lin.assemble_dS();
  REQUIRE(D.col_blocks == 2);
  const TangentPair t = random_pair(rng, 6, 1.0, 0.0);
  Eigen::VectorXcd x(2 * 13);
  for (int j = -6; j <= 6; ++j) {
    x[j + 6] = t.alpha[j];
    x[13 + j + 6] = t.beta[j];
  }
  const Eigen::VectorXcd y = D.entries * x;
  const PeriodicFunction g = lin.apply_dS(t);
  for (int k : nonzero_modes(4)) CHECK(std::abs(y[D.row_index(k)] - g[k]) < 1e-13);
}

TEST_CASE("resolvent identity") {
  const SpectralOperator Mt = assemble_M(MagneticSystem::trivial(1.0), 32);
  const ResolventReport rt = resolvent_inverse_check(Mt, 8);
  CHECK(rt.max_coupling < 1e-12);
  CHECK(rt.max_deviation < 1e-12);
  CHECK(rt.low_size == 16);
  CHECK(rt.high_size == 48);

  Rng rng(41);
  const SpectralOperator M = assemble_M(random_system(rng, 1.0, 4, 0.05), 32);
  const ResolventReport r = resolvent_inverse_check(M, 8);
  CHECK(r.max_deviation <= 1e-9);
  CHECK(r.max_coupling > 0.0);

  const ResolventReport all = resolvent_inverse_check(M, 32);
  CHECK(all.high_size == 0);
  CHECK(all.max_deviation <= 1e-9);

  SpectralOperator sing = Mt;
  sing.entries.row(Mt.row_index(1)).setZero();
  sing.entries.col(Mt.col_index(1)).setZero();
  CHECK_THROWS_AS(resolvent_inverse_check(sing, 8), SingularOperator);
}

TEST_CASE("decay diagnostics") {
  SpectralOperator D;
  D.row_modes = nonzero_modes(8);
  D.col_modes = D.row_modes;
  D.entries = Eigen::MatrixXcd::Zero(16, 16);
  for (int r = 0; r < 16; ++r) D.entries(r, r) = 1.0 + r;
  const std::vector<double> s_values{0.0, 2.0, 5.0};
  const DecayReport dr = decay_report(D, s_values, 2);
  for (double v : dr.band_sup) CHECK(v == 0.0);
  for (double v : dr.s_decay_norms) CHECK(v == doctest::Approx(16.0));

  Rng rng(42);
  const TangentPair p = random_pair(rng, 5, 1.0, 0.0);
  PeriodicFunction pf = p.alpha;
  pf.set(0, 0.7);
  const SpectralOperator T = multiplication_operator(pf, 12);
  for (double s : {0.0, 1.0, 3.0}) {
    CHECK(s_decay_norm(T, s) == doctest::Approx(sobolev_norm(pf, s)).epsilon(1e-13));
  }

  const SpectralOperator M = assemble_M(random_system(rng, 1.0, 3, 0.05), 32);
  const DecayReport mr = decay_report(M, s_values, 8);
  CHECK(mr.bands.size() > 4);
  CHECK(mr.band_sup.front() > mr.band_sup.back());
  CHECK(mr.loglog_slope < -3.0);
  CHECK(mr.exp_rate < 0.0);
  CHECK(mr.eigenvalues.front() > 0.0);
  CHECK(mr.diagonal_slope >= -1.2);
  CHECK(mr.diagonal_slope <= -0.8);
}
