#include "zoll/linops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <string>

#include "zoll/bessel.hpp"
#include "zoll/errors.hpp"

namespace zoll {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace

TangentPair operator+(const TangentPair& lhs, const TangentPair& rhs) {
  return {lhs.alpha + rhs.alpha, lhs.beta + rhs.beta};
}

TangentPair operator*(double factor, const TangentPair& t) {
  return {factor * t.alpha, factor * t.beta};
}

double sobolev_norm(const TangentPair& t, double s) { return sobolev_norm(t.alpha, t.beta, s); }

cplx inner_product(const TangentPair& lhs, const TangentPair& rhs) {
  return inner_product(lhs.alpha, rhs.alpha) + inner_product(lhs.beta, rhs.beta);
}

std::vector<int> nonzero_modes(int K) {
  std::vector<int> modes;
  modes.reserve(static_cast<std::size_t>(2 * K));
  for (int k = -K; k <= K; ++k) {
    if (k != 0) modes.push_back(k);
  }
  return modes;
}

int SpectralOperator::row_index(int k) const {
  const auto it = std::find(row_modes.begin(), row_modes.end(), k);
  return it == row_modes.end() ? -1 : static_cast<int>(it - row_modes.begin());
}

int SpectralOperator::col_index(int j) const {
  const auto it = std::find(col_modes.begin(), col_modes.end(), j);
  return it == col_modes.end() ? -1 : static_cast<int>(it - col_modes.begin());
}

double SpectralOperator::reality_defect() const {
  double defect = 0.0;
  for (std::size_t r = 0; r < row_modes.size(); ++r) {
    const int rr = row_index(-row_modes[r]);
    if (rr < 0) continue;
    for (std::size_t c = 0; c < col_modes.size(); ++c) {
      const int cc = col_index(-col_modes[c]);
      if (cc < 0) continue;
      defect = std::max(defect, std::abs(entries(rr, cc) - std::conj(entries(r, c))));
    }
  }
  return defect;
}

double SpectralOperator::hermitian_defect() const {
  return (entries - entries.adjoint()).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------

struct Linearization::Table {
  MagneticSystem sys;
  int K;
  int M;
  int pair_modes;
  // Column k-1 holds mode k evaluated at the M quadrature nodes.
  Eigen::MatrixXd j1;
  Eigen::MatrixXd j1p;
  Eigen::MatrixXd j1pp;
  Eigen::MatrixXcd phase;  // exp(-i k B(x_m))

  Table(const MagneticSystem& s, int k_max, int grid, int modes)
      : sys(s), K(k_max), M(grid), pair_modes(modes),
        j1(grid, k_max), j1p(grid, k_max), j1pp(grid, k_max), phase(grid, k_max) {
    const std::vector<LocalGeometry> geo = sys.sample(M);
    for (int m = 0; m < M; ++m) {
      for (int k = 1; k <= K; ++k) {
        const bessel::BesselEval e = bessel::j1_derivs(k * geo[m].A);
        j1(m, k - 1) = e.j1;
        j1p(m, k - 1) = e.j1p;
        j1pp(m, k - 1) = e.j1pp;
        phase(m, k - 1) = std::polar(1.0, -k * geo[m].B);
      }
    }
  }

  // Column for a signed mode, using J1 odd, J1' even and conj for k < 0.
  Eigen::VectorXcd signed_j1_phase(int k) const {
    const int a = std::abs(k);
    if (k > 0) return j1.col(a - 1).cast<cplx>().cwiseProduct(phase.col(a - 1));
    return -(j1.col(a - 1).cast<cplx>().cwiseProduct(phase.col(a - 1).conjugate()));
  }
  Eigen::VectorXcd signed_j1p_phase(int k) const {
    const int a = std::abs(k);
    if (k > 0) return j1p.col(a - 1).cast<cplx>().cwiseProduct(phase.col(a - 1));
    return j1p.col(a - 1).cast<cplx>().cwiseProduct(phase.col(a - 1).conjugate());
  }

  Eigen::VectorXd samples(const PeriodicFunction& u) const {
    const GridFunction g = to_grid(u, M);
    return Eigen::Map<const Eigen::VectorXd>(g.samples.data(), M);
  }
};

Linearization::Linearization(const MagneticSystem& sys, int K, LinearizationOptions opts) {
  if (K < 1) throw InvalidArgument("Linearization: K must be positive");
  const int M = opts.grid > 0 ? opts.grid : 16 * K;
  const int modes = opts.pair_modes > 0 ? opts.pair_modes : 2 * K;
  if (M < 2 * std::max(K, modes) + 1) throw InvalidArgument("Linearization: grid too small");
  table_ = std::make_unique<Table>(sys, K, M, modes);
}

Linearization::~Linearization() = default;
Linearization::Linearization(Linearization&&) noexcept = default;
Linearization& Linearization::operator=(Linearization&&) noexcept = default;

int Linearization::K() const noexcept { return table_->K; }
int Linearization::grid() const noexcept { return table_->M; }
int Linearization::pair_modes() const noexcept { return table_->pair_modes; }
const MagneticSystem& Linearization::system() const noexcept { return table_->sys; }

PeriodicFunction Linearization::apply_dS(const TangentPair& t) const {
  const Table& tb = *table_;
  const Eigen::VectorXd al = tb.samples(t.alpha);
  const Eigen::VectorXd be = tb.samples(t.beta);
  PeriodicFunction out(tb.K);
  const cplx i(0.0, 1.0);
  for (int k = 1; k <= tb.K; ++k) {
    cplx acc{};
    for (int m = 0; m < tb.M; ++m) {
      acc += (tb.j1p(m, k - 1) * al[m] - i * (tb.j1(m, k - 1) * be[m])) * tb.phase(m, k - 1);
    }
    out.set(k, acc * (kTwoPi / tb.M));
  }
  return out;
}

PeriodicFunction Linearization::apply_d2S(const TangentPair& t1, const TangentPair& t2) const {
  const Table& tb = *table_;
  const Eigen::VectorXd a1 = tb.samples(t1.alpha);
  const Eigen::VectorXd b1 = tb.samples(t1.beta);
  const Eigen::VectorXd a2 = tb.samples(t2.alpha);
  const Eigen::VectorXd b2 = tb.samples(t2.beta);
  PeriodicFunction out(tb.K);
  const cplx i(0.0, 1.0);
  for (int k = 1; k <= tb.K; ++k) {
    cplx acc{};
    for (int m = 0; m < tb.M; ++m) {
      const double real_part =
          tb.j1pp(m, k - 1) * a1[m] * a2[m] - tb.j1(m, k - 1) * b1[m] * b2[m];
      const double mixed = tb.j1p(m, k - 1) * (a2[m] * b1[m] + a1[m] * b2[m]);
      acc += (real_part - i * mixed) * tb.phase(m, k - 1);
    }
    out.set(k, acc * (static_cast<double>(k) * kTwoPi / tb.M));
  }
  return out;
}

TangentPair Linearization::apply_dS_adjoint(const PeriodicFunction& gamma) const {
  const Table& tb = *table_;
  GridFunction ga{std::vector<double>(static_cast<std::size_t>(tb.M), 0.0)};
  GridFunction gb{std::vector<double>(static_cast<std::size_t>(tb.M), 0.0)};
  const cplx i(0.0, 1.0);
  const int kmax = std::min(tb.K, gamma.max_mode());
  for (int m = 0; m < tb.M; ++m) {
    cplx sa{};
    cplx sb{};
    for (int j = 1; j <= kmax; ++j) {
      const cplx w = std::conj(tb.phase(m, j - 1)) * gamma[j];
      sa += tb.j1p(m, j - 1) * w;
      sb += i * (tb.j1(m, j - 1) * w);
    }
    // Modes -j contribute the complex conjugates.
    ga.samples[m] = 2.0 * kTwoPi * sa.real();
    gb.samples[m] = 2.0 * kTwoPi * sb.real();
  }
  return {from_grid(ga, tb.pair_modes), from_grid(gb, tb.pair_modes)};
}

SpectralOperator Linearization::assemble_M() const {
  const Table& tb = *table_;
  const std::vector<int> modes = nonzero_modes(tb.K);
  const Eigen::Index n = static_cast<Eigen::Index>(modes.size());
  Eigen::MatrixXcd f1(tb.M, n);
  Eigen::MatrixXcd f2(tb.M, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    f1.col(c) = tb.signed_j1_phase(modes[c]);
    f2.col(c) = tb.signed_j1p_phase(modes[c]);
  }
  SpectralOperator op;
  op.row_modes = modes;
  op.col_modes = modes;
  const double w = kTwoPi * kTwoPi / tb.M;
  op.entries = w * (f1.transpose() * f1.conjugate() + f2.transpose() * f2.conjugate());
  return op;
}

SpectralOperator Linearization::assemble_M_without_mean() const {
  const Table& tb = *table_;
  SpectralOperator op = assemble_M();
  const Eigen::Index n = static_cast<Eigen::Index>(op.row_modes.size());
  Eigen::VectorXcd u(n);
  Eigen::VectorXcd v(n);
  for (Eigen::Index c = 0; c < n; ++c) {
    u[c] = tb.signed_j1p_phase(op.row_modes[c]).sum() * (kTwoPi / tb.M);
    v[c] = tb.signed_j1_phase(op.row_modes[c]).sum() * (kTwoPi / tb.M);
  }
  op.entries -= u * u.adjoint() + v * v.adjoint();
  return op;
}

SpectralOperator Linearization::assemble_dS() const {
  const Table& tb = *table_;
  const int N = tb.pair_modes;
  SpectralOperator op;
  op.row_modes = nonzero_modes(tb.K);
  for (int j = -N; j <= N; ++j) op.col_modes.push_back(j);
  op.col_blocks = 2;
  const Eigen::Index rows = static_cast<Eigen::Index>(op.row_modes.size());
  const Eigen::Index width = 2 * N + 1;
  op.entries = Eigen::MatrixXcd::Zero(rows, 2 * width);
  const std::vector<double> x = grid_nodes(tb.M);
  const cplx i(0.0, 1.0);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const int k = op.row_modes[r];
    const Eigen::VectorXcd jp = tb.signed_j1p_phase(k);
    const Eigen::VectorXcd jv = tb.signed_j1_phase(k);
    for (int j = -N; j <= N; ++j) {
      cplx sa{};
      cplx sb{};
      for (int m = 0; m < tb.M; ++m) {
        const cplx e = std::polar(1.0, j * x[m]);
        sa += jp[m] * e;
        sb += jv[m] * e;
      }
      op.entries(r, j + N) = sa * (kTwoPi / tb.M);
      op.entries(r, width + j + N) = -i * sb * (kTwoPi / tb.M);
    }
  }
  return op;
}

PeriodicFunction apply_dS(const MagneticSystem& sys, const TangentPair& t, int K,
                          LinearizationOptions opts) {
  return Linearization(sys, K, opts).apply_dS(t);
}

PeriodicFunction apply_d2S(const MagneticSystem& sys, const TangentPair& t1,
                           const TangentPair& t2, int K, LinearizationOptions opts) {
  return Linearization(sys, K, opts).apply_d2S(t1, t2);
}

TangentPair apply_dS_adjoint(const MagneticSystem& sys, const PeriodicFunction& gamma, int K,
                             LinearizationOptions opts) {
  return Linearization(sys, K, opts).apply_dS_adjoint(gamma);
}

SpectralOperator assemble_M(const MagneticSystem& sys, int K, LinearizationOptions opts) {
  return Linearization(sys, K, opts).assemble_M();
}

TangentPair kernel_basis(double a_star, int k, double amplitude) {
  if (k == 0) throw InvalidArgument("kernel_basis: the kernel condition only constrains k != 0");
  if (!(a_star > 0.0)) throw InvalidArgument("kernel_basis: A_* must be positive");
  const int n = std::abs(k);
  const bessel::BesselEval e = bessel::j1_derivs(n * a_star);
  const double c = amplitude / std::sqrt(2.0 * (e.j1 * e.j1 + e.j1p * e.j1p));
  TangentPair t{PeriodicFunction(n), PeriodicFunction(n)};
  t.alpha.set(n, cplx(0.0, e.j1 * c));
  t.beta.set(n, cplx(e.j1p * c, 0.0));
  return t;
}

// ---------------------------------------------------------------------------

RightInverse::RightInverse(const Linearization& lin, double max_condition) : lin_(&lin) {
  const SpectralOperator op = lin.assemble_M_without_mean();
  const Eigen::MatrixXcd h = 0.5 * (op.entries + op.entries.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
  if (solver.info() != Eigen::Success) {
    throw SingularOperator("RightInverse: eigen-decomposition failed",
                           std::numeric_limits<double>::infinity());
  }
  eigvals_ = solver.eigenvalues();
  eigvecs_ = solver.eigenvectors();
  min_eig_ = eigvals_.minCoeff();
  max_eig_ = eigvals_.maxCoeff();
  condition_ = min_eig_ > 0.0 ? max_eig_ / min_eig_ : std::numeric_limits<double>::infinity();
  if (!(condition_ <= max_condition)) {
    throw SingularOperator("RightInverse: normal operator condition number " +
                               std::to_string(condition_) + " exceeds " +
                               std::to_string(max_condition),
                           condition_);
  }
}

TangentPair RightInverse::apply(const PeriodicFunction& gamma) const {
  const int K = lin_->K();
  const std::vector<int> modes = nonzero_modes(K);
  Eigen::VectorXcd g(static_cast<Eigen::Index>(modes.size()));
  for (std::size_t c = 0; c < modes.size(); ++c) g[c] = gamma[modes[c]];
  const Eigen::VectorXcd y =
      eigvecs_ * (eigvecs_.adjoint() * g).cwiseQuotient(eigvals_.cast<cplx>());
  std::vector<cplx> coeffs(static_cast<std::size_t>(2 * K + 1));
  for (std::size_t c = 0; c < modes.size(); ++c) coeffs[modes[c] + K] = y[c];
  double scale = 0.0;
  for (const cplx& c : coeffs) scale = std::max(scale, std::abs(c));
  const PeriodicFunction solved =
      PeriodicFunction::from_coefficients(coeffs, 1e-8 * std::max(1.0, scale));
  TangentPair out = lin_->apply_dS_adjoint(solved);
  out.alpha.set(0, 0.0);
  out.beta.set(0, 0.0);
  return out;
}

TangentPair right_inverse_apply(const MagneticSystem& sys, const PeriodicFunction& gamma, int K,
                                LinearizationOptions opts) {
  const Linearization lin(sys, K, opts);
  return RightInverse(lin).apply(gamma);
}

// ---------------------------------------------------------------------------

ResolventReport resolvent_inverse_check(const SpectralOperator& op, int n_cut) {
  if (op.row_modes != op.col_modes) {
    throw InvalidArgument("resolvent_inverse_check: operator must be square over one mode set");
  }
  std::vector<Eigen::Index> low;
  std::vector<Eigen::Index> high;
  for (std::size_t r = 0; r < op.row_modes.size(); ++r) {
    (std::abs(op.row_modes[r]) <= n_cut ? low : high).push_back(static_cast<Eigen::Index>(r));
  }
  const Eigen::Index nl = static_cast<Eigen::Index>(low.size());
  const Eigen::Index nh = static_cast<Eigen::Index>(high.size());
  auto block = [&](const std::vector<Eigen::Index>& rows, const std::vector<Eigen::Index>& cols) {
    Eigen::MatrixXcd b(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (std::size_t c = 0; c < cols.size(); ++c) b(r, c) = op.entries(rows[r], cols[c]);
    }
    return b;
  };

  ResolventReport rep;
  rep.n_cut = n_cut;
  rep.low_size = static_cast<int>(nl);
  rep.high_size = static_cast<int>(nh);
  if (nl == 0) throw InvalidArgument("resolvent_inverse_check: empty low-mode block");

  const Eigen::MatrixXcd m_ll = block(low, low);
  const Eigen::MatrixXcd m_lh = block(low, high);  // Pi_L M Pi_R
  const Eigen::MatrixXcd m_hl = block(high, low);  // Pi_R M Pi_L
  const Eigen::MatrixXcd m_hh = block(high, high);
  rep.max_coupling = nh > 0 ? std::max(m_lh.cwiseAbs().maxCoeff(), m_hl.cwiseAbs().maxCoeff()) : 0.0;

  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu_ll(m_ll);
  const double rcond = lu_ll.rcond();
  rep.low_condition = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  if (!(rcond > 1e-14)) {
    throw SingularOperator("resolvent_inverse_check: low-mode block is singular", rep.low_condition);
  }
  const Eigen::MatrixXcd inv_ll = lu_ll.inverse();

  Eigen::MatrixXcd blocks = Eigen::MatrixXcd::Zero(nl + nh, nl + nh);
  if (nh == 0) {
    blocks = inv_ll;
  } else {
    const Eigen::MatrixXcd schur = m_hh - m_hl * inv_ll * m_lh;
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu_s(schur);
    if (!(lu_s.rcond() > 1e-14)) {
      throw SingularOperator("resolvent_inverse_check: reduced high-mode operator is singular",
                             1.0 / lu_s.rcond());
    }
    const Eigen::MatrixXcd inv_s = lu_s.inverse();
    blocks.topLeftCorner(nl, nl) = inv_ll + inv_ll * m_lh * inv_s * m_hl * inv_ll;
    blocks.topRightCorner(nl, nh) = -inv_ll * m_lh * inv_s;
    blocks.bottomLeftCorner(nh, nl) = -inv_s * m_hl * inv_ll;
    blocks.bottomRightCorner(nh, nh) = inv_s;
  }

  // Undo the low/high permutation.
  std::vector<Eigen::Index> order(low);
  order.insert(order.end(), high.begin(), high.end());
  const Eigen::Index n = nl + nh;
  rep.block_inverse.resize(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) rep.block_inverse(order[r], order[c]) = blocks(r, c);
  }
  const Eigen::MatrixXcd dense = op.entries.partialPivLu().inverse();
  rep.max_deviation = (rep.block_inverse - dense).cwiseAbs().maxCoeff();
  return rep;
}

double s_decay_norm(const SpectralOperator& op, double s) {
  std::map<int, double> sup;
  for (Eigen::Index r = 0; r < op.entries.rows(); ++r) {
    for (Eigen::Index c = 0; c < op.entries.cols(); ++c) {
      const int band = op.col_modes[c] - op.row_modes[r];
      double& v = sup[band];
      v = std::max(v, std::abs(op.entries(r, c)));
    }
  }
  double acc = 0.0;
  for (const auto& [band, v] : sup) {
    acc += v * v * std::pow(std::max(1.0, std::abs(static_cast<double>(band))), 2.0 * s);
  }
  return std::sqrt(acc);
}

double diagonal_slope(const SpectralOperator& op, int j_min, int j_max) {
  std::vector<double> lx;
  std::vector<double> ly;
  for (int j = j_min; j <= j_max; ++j) {
    const int r = op.row_index(j);
    const int c = op.col_index(j);
    if (r < 0 || c < 0) continue;
    lx.push_back(std::log(static_cast<double>(j)));
    ly.push_back(std::log(std::abs(op.entries(r, c))));
  }
  return fit_slope(lx, ly);
}

DecayReport decay_report(const SpectralOperator& op, std::span<const double> s_values, int n_cut) {
  DecayReport rep;
  rep.n_cut = n_cut;
  rep.s_values.assign(s_values.begin(), s_values.end());
  for (double s : s_values) rep.s_decay_norms.push_back(s_decay_norm(op, s));

  std::map<int, double> sup;
  for (Eigen::Index r = 0; r < op.entries.rows(); ++r) {
    const int k = op.row_modes[r];
    if (std::abs(k) <= n_cut) continue;
    const int rc = op.col_index(k);
    if (rc < 0) continue;
    const cplx diag = op.entries(r, rc);
    for (Eigen::Index c = 0; c < op.entries.cols(); ++c) {
      const int j = op.col_modes[c];
      if (std::abs(j) <= n_cut || j == k) continue;
      double& v = sup[std::abs(j - k)];
      v = std::max(v, std::abs(op.entries(r, c) / diag));
    }
  }
  double peak = 0.0;
  for (const auto& [band, v] : sup) {
    rep.bands.push_back(band);
    rep.band_sup.push_back(v);
    peak = std::max(peak, v);
  }
  // Fit only above the round-off floor.
  std::vector<double> lx;
  std::vector<double> ly;
  std::vector<double> mx;
  for (std::size_t i = 0; i < rep.bands.size(); ++i) {
    if (rep.band_sup[i] > 1e-13 * std::max(1.0, peak) && rep.band_sup[i] > 0.0) {
      lx.push_back(std::log(static_cast<double>(rep.bands[i])));
      mx.push_back(static_cast<double>(rep.bands[i]));
      ly.push_back(std::log(rep.band_sup[i]));
    }
  }
  rep.loglog_slope = fit_slope(lx, ly);
  rep.exp_rate = fit_slope(mx, ly);

  if (op.entries.rows() == op.entries.cols()) {
    const Eigen::MatrixXcd h = 0.5 * (op.entries + op.entries.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd ev = solver.eigenvalues();
    rep.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  }
  int kmax = 0;
  for (int k : op.row_modes) kmax = std::max(kmax, k);
  rep.diagonal_slope = kmax > 8 ? diagonal_slope(op, 8, kmax) : std::numeric_limits<double>::quiet_NaN();
  return rep;
}

SpectralOperator multiplication_operator(const PeriodicFunction& p, int K) {
  SpectralOperator op;
  for (int j = -K; j <= K; ++j) op.row_modes.push_back(j);
  op.col_modes = op.row_modes;
  const Eigen::Index n = 2 * K + 1;
  op.entries.resize(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) op.entries(r, c) = p[op.row_modes[r] - op.col_modes[c]];
  }
  return op;
}

}  // namespace zoll
