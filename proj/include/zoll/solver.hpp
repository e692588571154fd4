#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "zoll/linops.hpp"
#include "zoll/magsys.hpp"

namespace zoll {

struct SolveConfig {
  int K = 32;                  // modes of S
  int M = 0;                   // quadrature nodes; 0 selects 16 K
  double tol = 1e-10;          // target |S|_{s_residual}
  double s_residual = 3.0;
  int max_iter = 20;
  double damping = 1.0;        // initial step length, in (0, 1]
  int pair_modes = 0;          // max mode of a, b updates; 0 selects 2 K
  int nash_moser_n0 = 0;       // > 0 truncates update n to modes <= n0 2^n
  double max_condition = 1e8;
  bool self_test = true;       // grid-doubling self test of every action evaluation

  int grid() const noexcept { return M > 0 ? M : 16 * K; }
  int modes() const noexcept { return pair_modes > 0 ? pair_modes : 2 * K; }
  /// Throws InvalidArgument when a field is out of range.
  void validate() const;
};

enum class SolveStatus {
  Converged,
  Diverged,          // residual increased twice in one step
  Stalled,           // residual stopped decreasing at a floor far below the start
  IllConditioned,    // normal operator condition number above the limit
  LostMonotonicity,  // an iterate is not a valid perturbative system
  MaxIterations,
};

const char* to_string(SolveStatus status) noexcept;

struct SolveReport {
  SolveStatus status = SolveStatus::MaxIterations;
  bool converged = false;
  int iterations = 0;
  std::vector<double> iterates;            // |S|_s, one per accepted iterate (first = initial)
  std::vector<double> condition_numbers;   // one per Newton step
  std::vector<double> step_lengths;        // accepted damping factor per step
  std::vector<double> linear_model_ratio;  // |S + dS[delta]|_0 / |S|_0 per step
  double final_norm = 0.0;
  double tangency_defect = std::numeric_limits<double>::quiet_NaN();
  std::string message;

  /// max over the last (up to) 3 steps of r_{n+1} / r_n^{1.5}.
  double superlinear_constant() const;
};

struct SolveResult {
  MagneticSystem system;
  SolveReport report;
};

/// Newton iteration for S(a, b) = 0 from (a, b) = init, with updates
/// -R(a,b) S(a,b) through the right inverse. Mode-0 components of (a, b) stay
/// at their initial values. Failures are reported in the status and the last
/// accepted iterate is returned; only an invalid starting point throws.
SolveResult newton_solve(double a_star, const TangentPair& init, const SolveConfig& cfg);

/// |dS(0,0)[direction]|_0.
double kernel_defect(double a_star, const TangentPair& direction, int K);

enum class TauSpacing { Geometric, Linear };

/// Geometric: tau_max 2^{-i}, i = 0..steps-1. Linear: tau_max i / steps,
/// i = 1..steps. Returned in increasing |tau|.
std::vector<double> tau_schedule(double tau_max, int steps, TauSpacing spacing);

struct FamilyMember {
  double tau;
  MagneticSystem system;
  SolveReport report;
  double tangency_defect;  // |(a(tau), b(tau))/tau - (alpha, beta)|_3
};

struct ContinuationResult {
  std::vector<FamilyMember> members;  // increasing |tau|, truncated at the first failure
  bool complete = false;
  std::optional<double> first_failed_tau;
  std::string failure;
  double tau_reached = 0.0;
  // Linear fit defect = intercept + slope |tau| over the three smallest |tau|.
  double tangency_slope = std::numeric_limits<double>::quiet_NaN();
  double tangency_intercept = std::numeric_limits<double>::quiet_NaN();
};

/// Zoll family through the trivial system along a kernel direction: for each
/// tau the Newton iteration starts from tau * direction. Throws
/// InvalidArgument if the direction is not in the kernel of dS(0,0).
ContinuationResult continuation(double a_star, const TangentPair& direction,
                                std::span<const double> taus, const SolveConfig& cfg);
ContinuationResult continuation(double a_star, const TangentPair& direction, double tau_max,
                                int steps, const SolveConfig& cfg);

}  // namespace zoll
