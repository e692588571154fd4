#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "zoll/solver.hpp"

namespace zoll {

/// Parameters of a solve run: the solver settings, the family direction and
/// the continuation schedule, plus output and verification settings.
struct RunConfig {
  double a_star = 1.0;
  SolveConfig solve;
  int kernel_mode = 1;            // ignored when direction_file is set
  double amplitude = 1.0;         // L^2 norm of the kernel direction
  std::string direction_file;     // pair file; relative paths resolve against the config file
  double tau_max = 0.02;
  int tau_steps = 1;
  TauSpacing tau_spacing = TauSpacing::Geometric;
  std::string out_dir = "out";
  std::uint64_t seed = 20240611;
  int verify_levels = 64;
  double verify_tol = 1e-6;

  /// Throws InvalidArgument when a value is out of range.
  void validate() const;
};

/// Flat "key = value" text; '#' starts a comment. Unknown keys, repeated keys
/// and unparsable values throw FormatError.
RunConfig parse_config(std::istream& is);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace zoll
