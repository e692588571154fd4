#pragma once

#include <complex>
#include <span>
#include <utility>
#include <vector>

namespace zoll {

using cplx = std::complex<double>;

/// Real 2pi-periodic function stored as its Fourier coefficients u(j),
/// |j| <= N, in the orthonormal basis e_j = exp(ijx) of L^2 with inner
/// product (1/2pi) int u conj(v). Reality u(-j) = conj(u(j)) is an invariant
/// of the type: every mutator writes both members of a pair.
class PeriodicFunction {
 public:
  PeriodicFunction() : PeriodicFunction(0) {}
  explicit PeriodicFunction(int max_mode);

  /// Builds from a full coefficient vector ordered j = -N..N. Throws
  /// InvariantViolation if the vector is not conjugate symmetric to `tol`
  /// (absolute, scaled by the largest coefficient); the stored value is the
  /// symmetrised one.
  static PeriodicFunction from_coefficients(std::span<const cplx> coeffs, double tol = 1e-10);

  /// a0 + sum_j (c_j cos jx + s_j sin jx), j = 1..N.
  static PeriodicFunction from_trig(double a0, std::span<const double> cos_coeffs,
                                    std::span<const double> sin_coeffs);

  int max_mode() const noexcept { return max_mode_; }

  /// Coefficient u(j); zero outside |j| <= N.
  cplx operator[](int j) const noexcept;

  /// Sets u(j) = c and u(-j) = conj(c). For j == 0 only the real part is kept.
  void set(int j, cplx c);

  /// Coefficients ordered j = -N..N.
  std::span<const cplx> coefficients() const noexcept { return coeffs_; }

  double operator()(double x) const { return eval(x); }
  double eval(double x) const;
  /// (u(x), u'(x)) in one pass.
  std::pair<double, double> eval_with_derivative(double x) const;

  /// Truncated or zero-padded copy with the given max mode.
  PeriodicFunction resized(int max_mode) const;

  bool is_zero() const noexcept;

  PeriodicFunction& operator+=(const PeriodicFunction& other);
  PeriodicFunction& operator-=(const PeriodicFunction& other);
  PeriodicFunction& operator*=(double factor);

 private:
  int max_mode_;
  std::vector<cplx> coeffs_;
};

PeriodicFunction operator+(PeriodicFunction lhs, const PeriodicFunction& rhs);
PeriodicFunction operator-(PeriodicFunction lhs, const PeriodicFunction& rhs);
PeriodicFunction operator*(double factor, PeriodicFunction u);
PeriodicFunction operator-(PeriodicFunction u);

/// Samples on the uniform grid x_m = 2 pi m / M.
struct GridFunction {
  std::vector<double> samples;

  std::size_t size() const noexcept { return samples.size(); }
  double node(std::size_t m) const;
};

/// Uniform grid nodes 2 pi m / M, m = 0..M-1.
std::vector<double> grid_nodes(int M);

/// Requires M >= 2N+1.
GridFunction to_grid(const PeriodicFunction& u, int M);
/// Discrete Fourier coefficients truncated to N; requires M >= 2N+1.
PeriodicFunction from_grid(const GridFunction& g, int N);

/// (sum <j>^{2s} |u(j)|^2)^{1/2}, <j> = max(1,|j|).
double sobolev_norm(const PeriodicFunction& u, double s);
/// Norm of a pair: sqrt(|u|_s^2 + |v|_s^2).
double sobolev_norm(const PeriodicFunction& u, const PeriodicFunction& v, double s);

/// L^2 inner product (1/2pi) int u conj(v) = sum u(j) conj(v(j)).
cplx inner_product(const PeriodicFunction& u, const PeriodicFunction& v);

PeriodicFunction derivative(const PeriodicFunction& u);
/// Zero-mean primitive of u; the mean of u is ignored.
PeriodicFunction primitive(const PeriodicFunction& u);
double mean(const PeriodicFunction& u);
PeriodicFunction zero_mean(PeriodicFunction u);
/// Exact product with max mode N_u + N_v, computed on an unaliased grid.
PeriodicFunction product(const PeriodicFunction& u, const PeriodicFunction& v);
/// (2 pi / M) sum of samples, i.e. the periodic trapezoid rule over T.
double quadrature(const GridFunction& g);

/// Largest |u(j)| over all modes, and the mode j >= 0 attaining it.
std::pair<int, double> largest_coefficient(const PeriodicFunction& u);

}  // namespace zoll
