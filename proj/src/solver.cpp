#include "zoll/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "zoll/action.hpp"
#include "zoll/errors.hpp"

namespace zoll {
namespace {

SpectralActionOptions action_options(const SolveConfig& cfg) {
  SpectralActionOptions opts;
  opts.grid = cfg.grid();
  opts.self_test = cfg.self_test;
  return opts;
}

LinearizationOptions lin_options(const SolveConfig& cfg) {
  return {cfg.grid(), cfg.modes()};
}

// Residuals this far below the starting value count as a round-off floor
// rather than a divergence.
constexpr double kFloorReduction = 1e-4;

}  // namespace

void SolveConfig::validate() const {
  if (K < 1 || K > 256) throw InvalidArgument("SolveConfig: K must be in [1, 256]");
  if (grid() < 16 * K) throw InvalidArgument("SolveConfig: M must be at least 16 K");
  if (!(tol >= 1e-12)) throw InvalidArgument("SolveConfig: tol must be at least 1e-12");
  if (!(s_residual >= 0.0)) throw InvalidArgument("SolveConfig: s_residual must be >= 0");
  if (max_iter < 0) throw InvalidArgument("SolveConfig: max_iter must be >= 0");
  if (!(damping > 0.0 && damping <= 1.0)) throw InvalidArgument("SolveConfig: damping must be in (0, 1]");
  if (grid() < 2 * modes() + 1) throw InvalidArgument("SolveConfig: grid too small for pair_modes");
  if (nash_moser_n0 < 0) throw InvalidArgument("SolveConfig: nash_moser_n0 must be >= 0");
  if (!(max_condition > 1.0)) throw InvalidArgument("SolveConfig: max_condition must exceed 1");
}

const char* to_string(SolveStatus status) noexcept {
  switch (status) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::Diverged: return "diverged";
    case SolveStatus::Stalled: return "stalled";
    case SolveStatus::IllConditioned: return "ill_conditioned";
    case SolveStatus::LostMonotonicity: return "lost_monotonicity";
    case SolveStatus::MaxIterations: return "max_iterations";
  }
  return "unknown";
}

double SolveReport::superlinear_constant() const {
  double worst = 0.0;
  const std::size_t n = iterates.size();
  for (std::size_t i = (n > 4 ? n - 4 : 0); i + 1 < n; ++i) {
    if (iterates[i] <= 0.0) continue;
    worst = std::max(worst, iterates[i + 1] / std::pow(iterates[i], 1.5));
  }
  return worst;
}

SolveResult newton_solve(double a_star, const TangentPair& init, const SolveConfig& cfg) {
  cfg.validate();
  const int N = cfg.modes();
  PeriodicFunction a = init.alpha.resized(std::max(N, init.alpha.max_mode()));
  PeriodicFunction b = init.beta.resized(std::max(N, init.beta.max_mode()));
  MagneticSystem sys(a_star, a, b);
  SolveReport rep;
  if (!(sys.monotonicity_margin() > 0.0)) {
    rep.status = SolveStatus::LostMonotonicity;
    rep.message = "initial system: first integral not monotone in x";
    rep.final_norm = std::numeric_limits<double>::infinity();  // never evaluated
    return {sys, rep};
  }

  ActionResult action = action_spectral(sys, cfg.K, action_options(cfg));
  double r = sobolev_norm(action.s_fun, cfg.s_residual);
  rep.iterates.push_back(r);
  const double r0 = r;

  for (int iter = 1; iter <= cfg.max_iter + 1; ++iter) {
    if (r < cfg.tol) {
      rep.status = SolveStatus::Converged;
      rep.converged = true;
      break;
    }
    if (iter > cfg.max_iter) {
      rep.status = SolveStatus::MaxIterations;
      rep.message = "iteration limit reached";
      break;
    }

    const Linearization lin(sys, cfg.K, lin_options(cfg));
    std::optional<RightInverse> rinv;
    try {
      rinv.emplace(lin, cfg.max_condition);
    } catch (const SingularOperator& e) {
      rep.condition_numbers.push_back(e.condition());
      rep.status = SolveStatus::IllConditioned;
      rep.message = e.what();
      break;
    }
    rep.condition_numbers.push_back(rinv->condition_number());

    TangentPair delta = rinv->apply(action.s_fun);
    delta = -1.0 * delta;
    if (cfg.nash_moser_n0 > 0) {
      const int cut = std::min(N, cfg.nash_moser_n0 << std::min(iter - 1, 20));
      delta.alpha = delta.alpha.resized(cut).resized(N);
      delta.beta = delta.beta.resized(cut).resized(N);
    }
    const PeriodicFunction model = action.s_fun + lin.apply_dS(delta);
    rep.linear_model_ratio.push_back(sobolev_norm(model, 0.0) /
                                     sobolev_norm(action.s_fun, 0.0));

    double step = cfg.damping;
    int increases = 0;
    bool accepted = false;
    bool monotonicity_lost = false;
    while (!accepted) {
      try {
        MagneticSystem trial(a_star, a + step * delta.alpha, b + step * delta.beta);
        if (!(trial.monotonicity_margin() > 0.0)) {
          throw InvariantViolation("first integral not monotone");
        }
        ActionResult trial_action = action_spectral(trial, cfg.K, action_options(cfg));
        const double rt = sobolev_norm(trial_action.s_fun, cfg.s_residual);
        if (rt < r) {
          a = trial.a();
          b = trial.b();
          sys = std::move(trial);
          action = std::move(trial_action);
          r = rt;
          accepted = true;
          break;
        }
      } catch (const InvariantViolation&) {
        monotonicity_lost = true;
      }
      if (++increases >= 2) break;
      step *= 0.5;
    }
    if (!accepted) {
      if (monotonicity_lost) {
        rep.status = SolveStatus::LostMonotonicity;
        rep.message = "update left the perturbative regime";
      } else if (r <= kFloorReduction * r0) {
        rep.status = SolveStatus::Stalled;
        char buf[64];
        std::snprintf(buf, sizeof buf, "residual floor reached at %.3e", r);
        rep.message = buf;
      } else {
        rep.status = SolveStatus::Diverged;
        rep.message = "residual increased twice";
      }
      break;
    }
    rep.step_lengths.push_back(step);
    rep.iterates.push_back(r);
    rep.iterations = iter;
  }
  rep.final_norm = r;
  return {sys, rep};
}

double kernel_defect(double a_star, const TangentPair& direction, int K) {
  return sobolev_norm(apply_dS(MagneticSystem::trivial(a_star), direction, K), 0.0);
}

std::vector<double> tau_schedule(double tau_max, int steps, TauSpacing spacing) {
  if (steps < 1) throw InvalidArgument("tau_schedule: steps must be positive");
  std::vector<double> taus;
  for (int i = 0; i < steps; ++i) {
    taus.push_back(spacing == TauSpacing::Geometric ? tau_max * std::ldexp(1.0, -i)
                                                    : tau_max * (i + 1) / steps);
  }
  std::sort(taus.begin(), taus.end(), [](double x, double y) { return std::abs(x) < std::abs(y); });
  return taus;
}

ContinuationResult continuation(double a_star, const TangentPair& direction,
                                std::span<const double> taus, const SolveConfig& cfg) {
  cfg.validate();
  const double defect = kernel_defect(a_star, direction, cfg.K);
  if (!(defect < 1e-10)) {
    throw InvalidArgument("continuation: direction is not in the kernel of dS(0,0) (defect " +
                          std::to_string(defect) + ")");
  }
  std::vector<double> order(taus.begin(), taus.end());
  std::sort(order.begin(), order.end(), [](double x, double y) { return std::abs(x) < std::abs(y); });

  ContinuationResult out;
  for (double tau : order) {
    if (tau == 0.0) continue;
    SolveResult res = newton_solve(a_star, tau * direction, cfg);
    if (!res.report.converged) {
      out.first_failed_tau = tau;
      out.failure = std::string(to_string(res.report.status)) + ": " + res.report.message;
      break;
    }
    const TangentPair scaled{(1.0 / tau) * res.system.a(), (1.0 / tau) * res.system.b()};
    const TangentPair diff{scaled.alpha - direction.alpha, scaled.beta - direction.beta};
    res.report.tangency_defect = sobolev_norm(diff, 3.0);
    out.tau_reached = tau;
    out.members.push_back({tau, res.system, res.report, res.report.tangency_defect});
  }
  out.complete = !out.first_failed_tau.has_value();

  if (out.members.size() >= 2) {
    const std::size_t n = std::min<std::size_t>(3, out.members.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      mx += std::abs(out.members[i].tau);
      my += out.members[i].tangency_defect;
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dx = std::abs(out.members[i].tau) - mx;
      sxy += dx * (out.members[i].tangency_defect - my);
      sxx += dx * dx;
    }
    out.tangency_slope = sxy / sxx;
    out.tangency_intercept = my - out.tangency_slope * mx;
  }
  return out;
}

ContinuationResult continuation(double a_star, const TangentPair& direction, double tau_max,
                                int steps, const SolveConfig& cfg) {
  const std::vector<double> taus = tau_schedule(tau_max, steps, TauSpacing::Geometric);
  return continuation(a_star, direction, taus, cfg);
}

}  // namespace zoll
