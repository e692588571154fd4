#pragma once

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "zoll/action.hpp"
#include "zoll/geoverify.hpp"
#include "zoll/linops.hpp"
#include "zoll/magsys.hpp"
#include "zoll/spectral.hpp"

namespace zoll::io {

/// Shortest-safe decimal form with 17 significant digits (round-trips doubles).
std::string fmt(double v);

/// Writes "j re im" lines for j = -N..N.
void write_coefficients(std::ostream& os, const PeriodicFunction& u);

/// Reads coefficient blocks. Lines starting with '#' are comments; a block
/// ends at a blank line, at a line whose mode is not larger than the previous
/// one, or at a line that does not start with an integer mode. Each block must
/// be conjugate symmetric; the error names the offending mode. Missing modes
/// are zero.
std::vector<PeriodicFunction> read_coefficient_blocks(std::istream& is);

/// System file: "A_star <v>" followed by the blocks of a and b.
void write_system(std::ostream& os, const MagneticSystem& sys);
MagneticSystem read_system(std::istream& is);
void save_system(const std::filesystem::path& path, const MagneticSystem& sys);
MagneticSystem load_system(const std::filesystem::path& path);

/// Pair file: the blocks of alpha and beta.
void write_pair(std::ostream& os, const TangentPair& t);
TangentPair read_pair(std::istream& is);
void save_pair(const std::filesystem::path& path, const TangentPair& t);
TangentPair load_pair(const std::filesystem::path& path);

/// Operator dump: header "K N_cut", then one "k j re im" line per entry with
/// k the row mode and j the column mode.
void write_operator(std::ostream& os, const SpectralOperator& op, int K, int n_cut);

/// CSV "I,S,Delta" on n uniform levels in [0, 2 pi).
void write_action_csv(std::ostream& os, const ActionResult& action, int n);
/// CSV "t,x,y,phi,I".
void write_orbit_csv(std::ostream& os, const OrbitRecord& orbit);
/// CSV "I,Delta".
void write_displacement_csv(std::ostream& os, const DisplacementCurve& curve);
/// CSV "band,sup".
void write_decay_csv(std::ostream& os, const DecayReport& report);

/// Ordered "key = value" report.
class Report {
 public:
  void add(const std::string& key, const std::string& value);
  void add(const std::string& key, double value);
  void add(const std::string& key, int value);
  void add(const std::string& key, bool value);
  void add(const std::string& key, const std::vector<double>& values);
  void section(const std::string& name);
  const std::vector<std::pair<std::string, std::string>>& entries() const noexcept { return entries_; }
  void write(std::ostream& os) const;
  void save(const std::filesystem::path& path) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// Opens a file for writing, creating parent directories; throws IoError.
std::ofstream open_out(const std::filesystem::path& path);
std::ifstream open_in(const std::filesystem::path& path);

}  // namespace zoll::io
