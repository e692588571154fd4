#pragma once

#include <Eigen/Dense>
#include <memory>
#include <span>
#include <vector>

#include "zoll/magsys.hpp"
#include "zoll/spectral.hpp"

namespace zoll {

/// Tangent direction (alpha, beta) to the perturbation (a, b).
struct TangentPair {
  PeriodicFunction alpha;
  PeriodicFunction beta;
};

TangentPair operator+(const TangentPair& lhs, const TangentPair& rhs);
TangentPair operator*(double factor, const TangentPair& t);
/// sqrt(|alpha|_s^2 + |beta|_s^2)
double sobolev_norm(const TangentPair& t, double s);
/// (alpha, alpha')_L2 + (beta, beta')_L2
cplx inner_product(const TangentPair& lhs, const TangentPair& rhs);

/// Dense complex matrix over Fourier modes: entries(r, c) = (Op e_{col_modes[c]}, e_{row_modes[r]}).
/// When col_blocks == 2 the columns stack alpha modes first, then beta modes,
/// both listed in col_modes order within their block.
struct SpectralOperator {
  std::vector<int> row_modes;
  std::vector<int> col_modes;
  int col_blocks = 1;
  Eigen::MatrixXcd entries;

  /// Index of mode k among the rows, or -1.
  int row_index(int k) const;
  int col_index(int j) const;
  /// max |Op^{-j}_{-k} - conj(Op^j_k)| over the square mode range.
  double reality_defect() const;
  /// max |Op^j_k - conj(Op^k_j)|.
  double hermitian_defect() const;
};

/// Modes -K..-1, 1..K.
std::vector<int> nonzero_modes(int K);

struct LinearizationOptions {
  int grid = 0;        // quadrature nodes; 0 selects 16 K
  int pair_modes = 0;  // max mode of tangent pairs produced by adjoints; 0 selects 2 K
};

/// Linearization of S at a fixed system and mode cutoff K. Caches J1, J1',
/// J1'' at k A(x_m) and exp(-i k B(x_m)) for 1 <= k <= K on the quadrature
/// grid, so repeated applications at one iterate share the Bessel work.
class Linearization {
 public:
  Linearization(const MagneticSystem& sys, int K, LinearizationOptions opts = {});
  ~Linearization();
  Linearization(Linearization&&) noexcept;
  Linearization& operator=(Linearization&&) noexcept;

  int K() const noexcept;
  int grid() const noexcept;
  int pair_modes() const noexcept;
  const MagneticSystem& system() const noexcept;

  /// dS[alpha, beta]: coefficient k is int [J1'(kA) alpha - i J1(kA) beta] e^{-ikB} dx.
  PeriodicFunction apply_dS(const TangentPair& t) const;
  /// d^2S[t1, t2]: coefficient k is
  /// int k [J1'' alpha alpha1 - J1 beta beta1 - i J1' (alpha1 beta + alpha beta1)] e^{-ikB} dx.
  PeriodicFunction apply_d2S(const TangentPair& t1, const TangentPair& t2) const;
  /// L^2 adjoint 2 pi (sum J1'(jA) e^{ijB} g(j), i sum J1(jA) e^{ijB} g(j)),
  /// projected onto modes |m| <= pair_modes.
  TangentPair apply_dS_adjoint(const PeriodicFunction& gamma) const;

  /// M^j_k = 2 pi int (J1(kA) J1(jA) + J1'(kA) J1'(jA)) e^{i(j-k)B} dx, 0 < |j|,|k| <= K.
  SpectralOperator assemble_M() const;
  /// M minus the part carried by the mode-0 components of dS^*, i.e. the
  /// normal operator of dS restricted to tangent pairs without mode 0.
  SpectralOperator assemble_M_without_mean() const;
  /// Matrix of dS from stacked (alpha, beta) modes |m| <= pair_modes.
  SpectralOperator assemble_dS() const;

 private:
  struct Table;
  std::unique_ptr<Table> table_;
};

PeriodicFunction apply_dS(const MagneticSystem& sys, const TangentPair& t, int K,
                          LinearizationOptions opts = {});
PeriodicFunction apply_d2S(const MagneticSystem& sys, const TangentPair& t1,
                           const TangentPair& t2, int K, LinearizationOptions opts = {});
TangentPair apply_dS_adjoint(const MagneticSystem& sys, const PeriodicFunction& gamma, int K,
                             LinearizationOptions opts = {});
SpectralOperator assemble_M(const MagneticSystem& sys, int K, LinearizationOptions opts = {});

/// Real tangent pair on modes +-k spanning the k-th direction of the kernel of
/// dS(0,0): alpha(k) = i J1(k A_*) c, beta(k) = J1'(k A_*) c, with c > 0
/// chosen so that |(alpha, beta)|_0 = amplitude.
TangentPair kernel_basis(double a_star, int k, double amplitude);

/// Right inverse R = dS^* (dS dS^*)^{-1} at one system. The inversion is a
/// dense Hermitian eigen-decomposition of the mean-free normal operator, and
/// returned pairs carry no mode-0 component.
class RightInverse {
 public:
  /// Throws SingularOperator if the condition number exceeds max_condition.
  explicit RightInverse(const Linearization& lin, double max_condition = 1e8);

  TangentPair apply(const PeriodicFunction& gamma) const;
  double condition_number() const noexcept { return condition_; }
  double min_eigenvalue() const noexcept { return min_eig_; }
  double max_eigenvalue() const noexcept { return max_eig_; }

 private:
  const Linearization* lin_;
  Eigen::MatrixXcd eigvecs_;
  Eigen::VectorXd eigvals_;
  double condition_ = 0.0;
  double min_eig_ = 0.0;
  double max_eig_ = 0.0;
};

TangentPair right_inverse_apply(const MagneticSystem& sys, const PeriodicFunction& gamma, int K,
                                LinearizationOptions opts = {});

struct ResolventReport {
  int n_cut = 0;
  int low_size = 0;
  int high_size = 0;
  double max_deviation = 0.0;  // max entry of |block inverse - dense inverse|
  double max_coupling = 0.0;   // max entry of the low/high coupling blocks
  double low_condition = 0.0;
  Eigen::MatrixXcd block_inverse;
};

/// Inverts M through the low/high mode resolvent (Schur complement) identity
/// with low modes 0 < |j| <= n_cut and compares against a dense inverse.
/// Throws SingularOperator if the low block is singular.
ResolventReport resolvent_inverse_check(const SpectralOperator& op, int n_cut);

struct DecayReport {
  std::vector<double> s_values;
  std::vector<double> s_decay_norms;  // |op|_s for each s
  int n_cut = 0;
  std::vector<int> bands;             // |j - k| >= 1
  std::vector<double> band_sup;       // sup |(D^{-1}(op - diag))^j_k| on the band, |j|,|k| > n_cut
  double loglog_slope = 0.0;          // fit of log band_sup against log band
  double exp_rate = 0.0;              // fit of log band_sup against band
  std::vector<double> eigenvalues;    // of the Hermitian part, ascending
  double diagonal_slope = 0.0;        // log-log slope of |op^j_j| over j in [8, K]
};

/// s-decay norm: (sum_m (sup_{j-k=m} |op^j_k|)^2 <m>^{2s})^{1/2}.
double s_decay_norm(const SpectralOperator& op, double s);
/// Log-log slope of |op^j_j| against j for positive j in [j_min, j_max].
double diagonal_slope(const SpectralOperator& op, int j_min, int j_max);
DecayReport decay_report(const SpectralOperator& op, std::span<const double> s_values, int n_cut);

/// Matrix of multiplication by p on modes |j| <= K: entries p(k - j).
SpectralOperator multiplication_operator(const PeriodicFunction& p, int K);

}  // namespace zoll
