#include "zoll/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "zoll/errors.hpp"

namespace zoll {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_grid(int M, int N, const char* who) {
  if (M < 2 * N + 1) {
    throw InvalidArgument(std::string(who) + ": grid of " + std::to_string(M) +
                          " nodes cannot resolve max mode " + std::to_string(N));
  }
}

// Table of exp(2 pi i r / M), r = 0..M-1.
std::vector<cplx> twiddles(int M) {
  std::vector<cplx> w(static_cast<std::size_t>(M));
  for (int r = 0; r < M; ++r) w[r] = std::polar(1.0, kTwoPi * r / M);
  return w;
}

}  // namespace

PeriodicFunction::PeriodicFunction(int max_mode)
    : max_mode_(max_mode), coeffs_(static_cast<std::size_t>(2 * max_mode + 1)) {
  if (max_mode < 0) throw InvalidArgument("PeriodicFunction: negative max mode");
}

PeriodicFunction PeriodicFunction::from_coefficients(std::span<const cplx> coeffs, double tol) {
  if (coeffs.size() % 2 != 1) throw InvalidArgument("PeriodicFunction: even coefficient count");
  const int n = static_cast<int>(coeffs.size() / 2);
  double scale = 0.0;
  for (const cplx& c : coeffs) scale = std::max(scale, std::abs(c));
  PeriodicFunction u(n);
  for (int j = 0; j <= n; ++j) {
    const cplx pos = coeffs[n + j];
    const cplx neg = coeffs[n - j];
    const double asym = std::abs(pos - std::conj(neg));
    if (asym > tol * std::max(1.0, scale)) {
      throw InvariantViolation("reality symmetry broken at mode " + std::to_string(j) +
                               " (|u(j) - conj u(-j)| = " + std::to_string(asym) + ")");
    }
    u.set(j, 0.5 * (pos + std::conj(neg)));
  }
  return u;
}

PeriodicFunction PeriodicFunction::from_trig(double a0, std::span<const double> cos_coeffs,
                                             std::span<const double> sin_coeffs) {
  const int n = static_cast<int>(std::max(cos_coeffs.size(), sin_coeffs.size()));
  PeriodicFunction u(n);
  u.set(0, a0);
  for (int j = 1; j <= n; ++j) {
    const double c = j <= static_cast<int>(cos_coeffs.size()) ? cos_coeffs[j - 1] : 0.0;
    const double s = j <= static_cast<int>(sin_coeffs.size()) ? sin_coeffs[j - 1] : 0.0;
    // c cos + s sin = (c - i s)/2 e^{ijx} + conj
    u.set(j, cplx(0.5 * c, -0.5 * s));
  }
  return u;
}

cplx PeriodicFunction::operator[](int j) const noexcept {
  if (j < -max_mode_ || j > max_mode_) return {};
  return coeffs_[static_cast<std::size_t>(j + max_mode_)];
}

void PeriodicFunction::set(int j, cplx c) {
  if (j < -max_mode_ || j > max_mode_) {
    throw InvalidArgument("PeriodicFunction::set: mode " + std::to_string(j) + " out of range");
  }
  if (j == 0) {
    coeffs_[max_mode_] = cplx(c.real(), 0.0);
    return;
  }
  if (j < 0) {
    j = -j;
    c = std::conj(c);
  }
  coeffs_[max_mode_ + j] = c;
  coeffs_[max_mode_ - j] = std::conj(c);
}

double PeriodicFunction::eval(double x) const {
  const cplx w = std::polar(1.0, x);
  cplx e = w;
  double acc = 0.0;
  for (int j = 1; j <= max_mode_; ++j) {
    acc += (coeffs_[max_mode_ + j] * e).real();
    e *= w;
  }
  return coeffs_[max_mode_].real() + 2.0 * acc;
}

std::pair<double, double> PeriodicFunction::eval_with_derivative(double x) const {
  const cplx w = std::polar(1.0, x);
  cplx e = w;
  double val = 0.0;
  double der = 0.0;
  for (int j = 1; j <= max_mode_; ++j) {
    const cplx t = coeffs_[max_mode_ + j] * e;
    val += t.real();
    der -= j * t.imag();  // Re(i j t)
    e *= w;
  }
  return {coeffs_[max_mode_].real() + 2.0 * val, 2.0 * der};
}

PeriodicFunction PeriodicFunction::resized(int max_mode) const {
  PeriodicFunction out(max_mode);
  const int n = std::min(max_mode, max_mode_);
  for (int j = 0; j <= n; ++j) out.set(j, (*this)[j]);
  return out;
}

bool PeriodicFunction::is_zero() const noexcept {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](const cplx& c) { return c == cplx{}; });
}

PeriodicFunction& PeriodicFunction::operator+=(const PeriodicFunction& other) {
  if (other.max_mode_ > max_mode_) *this = resized(other.max_mode_);
  for (int j = -other.max_mode_; j <= other.max_mode_; ++j) {
    coeffs_[max_mode_ + j] += other[j];
  }
  return *this;
}

PeriodicFunction& PeriodicFunction::operator-=(const PeriodicFunction& other) {
  if (other.max_mode_ > max_mode_) *this = resized(other.max_mode_);
  for (int j = -other.max_mode_; j <= other.max_mode_; ++j) {
    coeffs_[max_mode_ + j] -= other[j];
  }
  return *this;
}

PeriodicFunction& PeriodicFunction::operator*=(double factor) {
  for (cplx& c : coeffs_) c *= factor;
  return *this;
}

PeriodicFunction operator+(PeriodicFunction lhs, const PeriodicFunction& rhs) { return lhs += rhs; }
PeriodicFunction operator-(PeriodicFunction lhs, const PeriodicFunction& rhs) { return lhs -= rhs; }
PeriodicFunction operator*(double factor, PeriodicFunction u) { return u *= factor; }
PeriodicFunction operator-(PeriodicFunction u) { return u *= -1.0; }

double GridFunction::node(std::size_t m) const {
  return kTwoPi * static_cast<double>(m) / static_cast<double>(samples.size());
}

std::vector<double> grid_nodes(int M) {
  std::vector<double> x(static_cast<std::size_t>(M));
  for (int m = 0; m < M; ++m) x[m] = kTwoPi * m / M;
  return x;
}

GridFunction to_grid(const PeriodicFunction& u, int M) {
  const int n = u.max_mode();
  require_grid(M, n, "to_grid");
  const std::vector<cplx> w = twiddles(M);
  GridFunction g{std::vector<double>(static_cast<std::size_t>(M))};
  for (int m = 0; m < M; ++m) {
    double acc = 0.0;
    for (int j = 1; j <= n; ++j) {
      acc += (u[j] * w[(static_cast<long>(j) * m) % M]).real();
    }
    g.samples[m] = u[0].real() + 2.0 * acc;
  }
  return g;
}

PeriodicFunction from_grid(const GridFunction& g, int N) {
  const int M = static_cast<int>(g.size());
  require_grid(M, N, "from_grid");
  const std::vector<cplx> w = twiddles(M);
  std::vector<cplx> coeffs(static_cast<std::size_t>(2 * N + 1));
  for (int j = -N; j <= N; ++j) {
    cplx acc{};
    for (int m = 0; m < M; ++m) {
      // exp(-i j x_m) = w[(-j m) mod M]
      long r = (-static_cast<long>(j) * m) % M;
      if (r < 0) r += M;
      acc += g.samples[m] * w[r];
    }
    coeffs[j + N] = acc / static_cast<double>(M);
  }
  return PeriodicFunction::from_coefficients(coeffs, 1e-10);
}

double sobolev_norm(const PeriodicFunction& u, double s) {
  double acc = 0.0;
  for (int j = -u.max_mode(); j <= u.max_mode(); ++j) {
    const double weight = std::pow(std::max(1.0, std::abs(static_cast<double>(j))), 2.0 * s);
    acc += weight * std::norm(u[j]);
  }
  return std::sqrt(acc);
}

double sobolev_norm(const PeriodicFunction& u, const PeriodicFunction& v, double s) {
  return std::hypot(sobolev_norm(u, s), sobolev_norm(v, s));
}

cplx inner_product(const PeriodicFunction& u, const PeriodicFunction& v) {
  const int n = std::min(u.max_mode(), v.max_mode());
  cplx acc{};
  for (int j = -n; j <= n; ++j) acc += u[j] * std::conj(v[j]);
  return acc;
}

PeriodicFunction derivative(const PeriodicFunction& u) {
  PeriodicFunction out(u.max_mode());
  for (int j = 1; j <= u.max_mode(); ++j) out.set(j, cplx(0.0, j) * u[j]);
  return out;
}

PeriodicFunction primitive(const PeriodicFunction& u) {
  PeriodicFunction out(u.max_mode());
  for (int j = 1; j <= u.max_mode(); ++j) out.set(j, u[j] / cplx(0.0, j));
  return out;
}

double mean(const PeriodicFunction& u) { return u[0].real(); }

PeriodicFunction zero_mean(PeriodicFunction u) {
  u.set(0, 0.0);
  return u;
}

PeriodicFunction product(const PeriodicFunction& u, const PeriodicFunction& v) {
  const int n = u.max_mode() + v.max_mode();
  const int M = 2 * n + 1;
  const GridFunction gu = to_grid(u, M);
  const GridFunction gv = to_grid(v, M);
  GridFunction g{std::vector<double>(static_cast<std::size_t>(M))};
  for (int m = 0; m < M; ++m) g.samples[m] = gu.samples[m] * gv.samples[m];
  return from_grid(g, n);
}

double quadrature(const GridFunction& g) {
  double acc = 0.0;
  for (double s : g.samples) acc += s;
  return kTwoPi * acc / static_cast<double>(g.size());
}

std::pair<int, double> largest_coefficient(const PeriodicFunction& u) {
  int best = 0;
  double mag = 0.0;
  for (int j = 0; j <= u.max_mode(); ++j) {
    if (std::abs(u[j]) > mag) {
      mag = std::abs(u[j]);
      best = j;
    }
  }
  return {best, mag};
}

}  // namespace zoll
