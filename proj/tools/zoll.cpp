// Command-line front end.
//
// Exit codes:
//   0  success
//   1  invalid input, configuration or file contents
//   2  solver failure (divergence, ill-conditioning, lost monotonicity, iteration limit)
//   3  certificate failure (spectral or dynamical), including a residual floor above tol
//   4  I/O failure

#include <cmath>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <string>

#include <CLI11.hpp>

#include "zoll/action.hpp"
#include "zoll/config.hpp"
#include "zoll/errors.hpp"
#include "zoll/geoverify.hpp"
#include "zoll/io.hpp"
#include "zoll/linops.hpp"
#include "zoll/sampling.hpp"
#include "zoll/solver.hpp"

namespace fs = std::filesystem;
using namespace zoll;

namespace {

enum Exit { kOk = 0, kInput = 1, kSolver = 2, kCertificate = 3, kIo = 4 };

void add_solve_report(io::Report& rep, const SolveReport& sr) {
  rep.add("status", std::string(to_string(sr.status)));
  rep.add("converged", sr.converged);
  rep.add("iterations", sr.iterations);
  rep.add("final_norm", sr.final_norm);
  rep.add("residuals", sr.iterates);
  rep.add("condition_numbers", sr.condition_numbers);
  rep.add("step_lengths", sr.step_lengths);
  rep.add("linear_model_ratio", sr.linear_model_ratio);
  if (!sr.message.empty()) rep.add("message", sr.message);
}

int cmd_kernel(double a_star, int k, double amplitude, const fs::path& out) {
  if (k == 0) {
    std::cerr << "kernel: mode k must be nonzero; the kernel condition "
                 "J1'(k A_*) alpha(k) = i J1(k A_*) beta(k) is only imposed for k != 0\n";
    return kInput;
  }
  if (!(a_star > 0.0)) {
    std::cerr << "kernel: A_* must be positive\n";
    return kInput;
  }
  if (amplitude == 0.0) std::cerr << "warning: amplitude 0 gives the zero direction\n";
  const TangentPair t = kernel_basis(a_star, k, amplitude);
  io::save_pair(out, t);
  const double defect = kernel_defect(a_star, t, std::max(16, 2 * std::abs(k)));
  std::cout << "kernel_defect = " << io::fmt(defect) << '\n';
  std::cout << "wrote " << out.string() << '\n';
  return kOk;
}

int cmd_solve(const fs::path& config_path, const std::string& out_override) {
  RunConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const IoError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kInput;
  }
  if (!out_override.empty()) cfg.out_dir = out_override;
  const fs::path out = cfg.out_dir;

  const TangentPair dir = cfg.direction_file.empty()
                              ? kernel_basis(cfg.a_star, cfg.kernel_mode, cfg.amplitude)
                              : io::load_pair(cfg.direction_file);
  const std::vector<double> taus = tau_schedule(cfg.tau_max, cfg.tau_steps, cfg.tau_spacing);
  const ContinuationResult fam = continuation(cfg.a_star, dir, taus, cfg.solve);

  io::Report rep;
  rep.add("a_star", cfg.a_star);
  rep.add("K", cfg.solve.K);
  rep.add("M", cfg.solve.grid());
  rep.add("tol", cfg.solve.tol);
  rep.add("s_residual", cfg.solve.s_residual);
  rep.add("seed", std::to_string(cfg.seed));
  rep.add("kernel_defect", kernel_defect(cfg.a_star, dir, cfg.solve.K));
  rep.add("taus", taus);
  rep.add("complete", fam.complete);
  rep.add("tau_reached", fam.tau_reached);
  if (fam.members.size() >= 2) {
    rep.add("tangency_slope", fam.tangency_slope);
    rep.add("tangency_intercept", fam.tangency_intercept);
  }

  bool certified = true;
  int index = 0;
  Rng rng(cfg.seed);
  for (const FamilyMember& m : fam.members) {
    const std::string name = "system_" + std::to_string(index++) + ".txt";
    io::save_system(out / name, m.system);
    SpectralActionOptions opts;
    opts.grid = 2 * cfg.solve.grid();
    const ZollCertificate cert =
        is_zoll(action_spectral(m.system, cfg.solve.K, opts), cfg.solve.s_residual, cfg.solve.tol);
    DynamicalCertificate dyn;
    std::string dyn_error;
    try {
      dyn = zoll_verify(m.system, cfg.verify_levels, cfg.verify_tol);
    } catch (const FlowRegimeError& e) {
      dyn_error = e.what();
    }
    certified = certified && cert.zoll && dyn_error.empty() && dyn.zoll;
    rep.section("member " + std::to_string(index - 1));
    rep.add("tau", m.tau);
    rep.add("file", name);
    rep.add("tangency_defect", m.tangency_defect);
    add_solve_report(rep, m.report);
    rep.add("certificate.zoll", cert.zoll);
    rep.add("certificate.norm", cert.norm);
    rep.add("certificate.worst_mode", cert.worst_mode);
    if (dyn_error.empty()) {
      rep.add("dynamical.zoll", dyn.zoll);
      rep.add("dynamical.max_abs_delta", dyn.max_abs_delta);
      rep.add("dynamical.max_closure_defect", dyn.max_closure_defect);
      rep.add("dynamical.max_I_drift", dyn.max_I_drift);
    } else {
      rep.add("dynamical.error", dyn_error);
    }
    // Spot check of the right inverse at the member on one seeded random gamma.
    try {
      const Linearization lin(m.system, cfg.solve.K);
      const RightInverse R(lin, cfg.solve.max_condition);
      const PeriodicFunction g = random_gamma(rng, cfg.solve.K);
      rep.add("right_inverse_residual", sobolev_norm(lin.apply_dS(R.apply(g)) - g, 0.0));
    } catch (const SingularOperator& e) {
      rep.add("right_inverse_residual", std::string("singular: ") + e.what());
    }
  }

  int code = kOk;
  if (!fam.complete) {
    // Re-run the failing member to report its iteration history.
    const SolveResult failed = newton_solve(cfg.a_star, *fam.first_failed_tau * dir, cfg.solve);
    rep.section("failure");
    rep.add("tau", *fam.first_failed_tau);
    add_solve_report(rep, failed.report);
    io::save_system(out / "system_last_iterate.txt", failed.system);
    code = failed.report.status == SolveStatus::Stalled ? kCertificate : kSolver;
    std::cerr << "solve: tau = " << io::fmt(*fam.first_failed_tau) << ": " << fam.failure << '\n';
    if (code == kCertificate) {
      std::cerr << "solve: residual " << io::fmt(failed.report.final_norm)
                << " stalled above tol " << io::fmt(cfg.solve.tol)
                << " (quadrature floor of the residual norm)\n";
    }
  } else if (!certified) {
    code = kCertificate;
    std::cerr << "solve: certificate failed (see report)\n";
  }
  rep.section("summary");
  rep.add("exit_code", code);
  rep.save(out / "report.txt");
  std::cout << "members = " << fam.members.size() << ", complete = " << (fam.complete ? "yes" : "no")
            << ", report = " << (out / "report.txt").string() << '\n';
  return code;
}

int cmd_verify(const fs::path& system_path, int levels, double tol_dyn, double integ_tol,
               const std::string& out, const std::string& csv) {
  const MagneticSystem sys = io::load_system(system_path);
  DynamicalCertificate cert;
  try {
    cert = zoll_verify(sys, levels, tol_dyn, integ_tol);
  } catch (const FlowRegimeError& e) {
    std::cerr << "verify: " << e.what() << '\n';
    return kCertificate;
  }
  io::Report rep;
  rep.add("system", system_path.string());
  rep.add("zoll", cert.zoll);
  rep.add("levels", cert.n_I);
  rep.add("tol_dyn", cert.tol_dyn);
  rep.add("max_abs_delta", cert.max_abs_delta);
  rep.add("worst_I", cert.worst_I);
  rep.add("max_closure_defect", cert.max_closure_defect);
  rep.add("max_I_drift", cert.max_I_drift);
  rep.add("mean_delta", cert.mean_delta);
  rep.write(std::cout);
  if (!out.empty()) rep.save(out);
  if (!csv.empty()) {
    std::ofstream os = io::open_out(csv);
    io::write_displacement_csv(os, cert.curve);
  }
  return cert.zoll ? kOk : kCertificate;
}

int cmd_geodesics(const fs::path& system_path, double I, double phi0, int revolutions, double tol,
                  const std::string& out) {
  const MagneticSystem sys = io::load_system(system_path);
  const double x0 = sys.invert_first_integral(I, phi0);
  const OrbitRecord orbit = integrate_orbit(sys, {x0, 0.0, phi0}, revolutions, tol, true);
  if (out.empty()) {
    io::write_orbit_csv(std::cout, orbit);
  } else {
    std::ofstream os = io::open_out(out);
    io::write_orbit_csv(os, orbit);
  }
  std::cerr << "I_drift = " << io::fmt(orbit.I_drift)
            << ", Delta = " << io::fmt(kOrientation * orbit.y_displacement)
            << ", closure_defect = " << io::fmt(orbit.closure_defect) << '\n';
  return kOk;
}

int cmd_report(const fs::path& system_path, int K, int n_cut, const fs::path& out) {
  if (K < 1) throw InvalidArgument("report: K must be positive");
  const MagneticSystem sys = io::load_system(system_path);
  const Linearization lin(sys, K);
  const SpectralOperator M = lin.assemble_M();
  const std::vector<double> s_values{0.0, 1.0, 2.0, 3.0};
  const DecayReport decay = decay_report(M, s_values, std::min(n_cut, K - 1));

  double off_diag = 0.0;
  for (Eigen::Index r = 0; r < M.entries.rows(); ++r) {
    for (Eigen::Index c = 0; c < M.entries.cols(); ++c) {
      if (r != c) off_diag = std::max(off_diag, std::abs(M.entries(r, c)));
    }
  }
  const ActionResult action = action_spectral(sys, K);

  io::Report rep;
  rep.add("system", system_path.string());
  rep.add("K", K);
  rep.add("n_cut", decay.n_cut);
  rep.add("max_off_diagonal", off_diag);
  rep.add("diagonal_slope", decay.diagonal_slope);
  rep.add("s_values", decay.s_values);
  rep.add("s_decay_norms", decay.s_decay_norms);
  rep.add("band_loglog_slope", decay.loglog_slope);
  rep.add("band_exp_rate", decay.exp_rate);
  rep.add("eigenvalues", decay.eigenvalues);
  rep.add("action_norm_0", action.residual_norms.at(0.0));
  rep.add("action_norm_3", action.residual_norms.at(3.0));
  rep.add("action_norm_6", action.residual_norms.at(6.0));
  rep.save(out / "report.txt");
  {
    std::ofstream os = io::open_out(out / "decay.csv");
    io::write_decay_csv(os, decay);
  }
  {
    std::ofstream os = io::open_out(out / "operator.txt");
    io::write_operator(os, M, K, decay.n_cut);
  }
  {
    std::ofstream os = io::open_out(out / "action.csv");
    io::write_action_csv(os, action, 256);
  }
  rep.write(std::cout);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Integrable Zoll magnetic systems on the 2-torus"};
  app.require_subcommand(1);

  double k_astar = 1.0, k_amp = 1.0;
  int k_mode = 1;
  std::string k_out = "kernel.txt";
  auto* kernel = app.add_subcommand("kernel", "write a kernel direction of dS(0,0)");
  kernel->add_option("--a-star", k_astar, "A_*")->capture_default_str();
  kernel->add_option("-k,--mode", k_mode, "Fourier mode k != 0")->capture_default_str();
  kernel->add_option("--amplitude", k_amp, "L2 norm of the pair")->capture_default_str();
  kernel->add_option("-o,--out", k_out, "output pair file")->capture_default_str();

  std::string s_config, s_out;
  auto* solve = app.add_subcommand("solve", "Newton continuation from a config file");
  solve->add_option("config", s_config, "config file")->required();
  solve->add_option("--out-dir", s_out, "override out_dir");

  std::string v_sys, v_out, v_csv;
  int v_levels = 64;
  double v_tol = 1e-6, v_itol = 1e-11;
  auto* verify = app.add_subcommand("verify", "dynamical Zoll certificate");
  verify->add_option("system", v_sys, "system file")->required();
  verify->add_option("--levels", v_levels, "number of first-integral levels")->capture_default_str();
  verify->add_option("--tol", v_tol, "tolerance on |Delta|")->capture_default_str();
  verify->add_option("--integrator-tol", v_itol, "ODE tolerance")->capture_default_str();
  verify->add_option("-o,--out", v_out, "certificate file");
  verify->add_option("--csv", v_csv, "displacement curve CSV");

  std::string g_sys, g_out;
  double g_I = 0.0, g_phi = 0.0, g_tol = 1e-11;
  int g_rev = 1;
  auto* geo = app.add_subcommand("geodesics", "orbit trace as CSV");
  geo->add_option("system", g_sys, "system file")->required();
  geo->add_option("--level", g_I, "first-integral value I")->capture_default_str();
  geo->add_option("--phi0", g_phi, "initial velocity angle")->capture_default_str();
  geo->add_option("--revolutions", g_rev, "phi revolutions")->capture_default_str();
  geo->add_option("--tol", g_tol, "ODE tolerance")->capture_default_str();
  geo->add_option("-o,--out", g_out, "CSV file (stdout if omitted)");

  std::string r_sys, r_out = "report";
  int r_K = 32, r_cut = 8;
  auto* report = app.add_subcommand("report", "normal operator and decay diagnostics");
  report->add_option("system", r_sys, "system file")->required();
  report->add_option("-K", r_K, "mode cutoff")->capture_default_str();
  report->add_option("--n-cut", r_cut, "low-mode cutoff")->capture_default_str();
  report->add_option("--out-dir", r_out, "output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInput;
  }

  try {
    if (*kernel) return cmd_kernel(k_astar, k_mode, k_amp, k_out);
    if (*solve) return cmd_solve(s_config, s_out);
    if (*verify) return cmd_verify(v_sys, v_levels, v_tol, v_itol, v_out, v_csv);
    if (*geo) return cmd_geodesics(g_sys, g_I, g_phi, g_rev, g_tol, g_out);
    if (*report) return cmd_report(r_sys, r_K, r_cut, r_out);
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const FormatError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInput;
  } catch (const InvalidArgument& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInput;
  } catch (const InvariantViolation& e) {
    std::cerr << "invalid system: " << e.what() << '\n';
    return kInput;
  } catch (const FlowRegimeError& e) {
    std::cerr << "flow error: " << e.what() << '\n';
    return kCertificate;
  } catch (const ResolutionError& e) {
    std::cerr << "resolution error: " << e.what() << '\n';
    return kSolver;
  } catch (const SingularOperator& e) {
    std::cerr << "singular operator: " << e.what() << '\n';
    return kSolver;
  }
  return kInput;
}
