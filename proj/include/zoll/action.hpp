#pragma once

#include <map>

#include "zoll/magsys.hpp"
#include "zoll/spectral.hpp"

namespace zoll {

/// The action S(a,b) as a zero-mean periodic function of the first integral
/// I, its derivative Delta = S', and a few Sobolev norms of S.
struct ActionResult {
  PeriodicFunction s_fun;
  PeriodicFunction delta;
  std::map<double, double> residual_norms;  // s -> |S|_s for s in {0, 3, 6}
  double self_test_change = 0.0;            // max coefficient change under refinement
};

struct SpectralActionOptions {
  int grid = 0;  // quadrature nodes in x; 0 selects 16 K
  bool self_test = true;
  double self_test_tol = 1e-8;
};

/// S(k) = (1/k) int_T J1(k A(x)) exp(-i k B(x)) dx for 0 < |k| <= K, S(0) = 0,
/// by the periodic trapezoid rule. With self_test the result is recomputed on
/// twice the grid and a change above self_test_tol throws ResolutionError.
ActionResult action_spectral(const MagneticSystem& sys, int K, SpectralActionOptions opts = {});

struct DirectActionOptions {
  bool self_test = true;
  double self_test_tol = 1e-8;
};

/// S(I) = int_T cos^2(phi) A(x(I,phi)) dx/dI dphi - pi A_0 evaluated on n_I
/// uniform levels by an n_phi-node trapezoid rule in phi, then transformed to
/// coefficients |k| <= K. Independent of the Bessel representation. The self
/// test doubles n_phi.
ActionResult action_direct(const MagneticSystem& sys, int K, int n_phi, int n_I,
                           DirectActionOptions opts = {});

/// Direct-formula value of S at a single level I (before mean removal).
double action_direct_at(const MagneticSystem& sys, double I, int n_phi);

struct ZollCertificate {
  bool zoll = false;
  double s = 0.0;
  double tol = 0.0;
  double norm = 0.0;
  int worst_mode = 0;
  double worst_abs = 0.0;
};

/// Zoll iff |S|_s < tol.
ZollCertificate is_zoll(const ActionResult& result, double s, double tol);

/// Fills delta and the residual norm table from s_fun.
void finalize_action(ActionResult& result);

}  // namespace zoll
