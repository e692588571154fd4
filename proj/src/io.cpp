#include "zoll/io.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <sstream>

#include "zoll/errors.hpp"

namespace zoll::io {
namespace {

constexpr double kRealityTol = 1e-12;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Line source shared by the readers; tracks line numbers for messages.
struct Lines {
  explicit Lines(std::istream& s) : is(s) {}

  std::istream& is;
  int number = 0;

  bool next(std::string& out) {
    if (!std::getline(is, out)) return false;
    ++number;
    return true;
  }
};

bool parse_mode_line(const std::string& line, long& j, double& re, double& im) {
  std::istringstream ss(line);
  if (!(ss >> j)) return false;
  if (!(ss >> re >> im)) return false;
  std::string rest;
  return !(ss >> rest);
}

PeriodicFunction build_block(const std::map<long, cplx>& modes, int block, int first_line) {
  long n = 0;
  for (const auto& [j, c] : modes) n = std::max(n, std::labs(j));
  if (n > 1'000'000) throw FormatError("coefficient block: mode out of range");
  std::vector<cplx> coeffs(static_cast<std::size_t>(2 * n + 1));
  for (const auto& [j, c] : modes) coeffs[static_cast<std::size_t>(j + n)] = c;
  try {
    return PeriodicFunction::from_coefficients(coeffs, kRealityTol);
  } catch (const InvariantViolation& e) {
    throw FormatError("coefficient block " + std::to_string(block) + " (from line " +
                      std::to_string(first_line) + "): " + e.what());
  }
}

std::vector<PeriodicFunction> read_blocks(Lines& lines) {
  std::vector<PeriodicFunction> blocks;
  std::map<long, cplx> current;
  long prev = 0;
  int first_line = 0;
  auto flush = [&]() {
    if (current.empty()) return;
    blocks.push_back(build_block(current, static_cast<int>(blocks.size()) + 1, first_line));
    current.clear();
  };
  std::string raw;
  while (lines.next(raw)) {
    const std::string line = trim(raw);
    if (line.empty()) {
      flush();
      continue;
    }
    if (line[0] == '#') continue;
    long j = 0;
    double re = 0.0, im = 0.0;
    if (!parse_mode_line(line, j, re, im)) {
      throw FormatError("line " + std::to_string(lines.number) + ": expected \"j re im\", got \"" +
                        line + "\"");
    }
    if (!std::isfinite(re) || !std::isfinite(im)) {
      throw FormatError("line " + std::to_string(lines.number) + ": non-finite coefficient");
    }
    if (!current.empty() && j <= prev) flush();
    if (current.empty()) first_line = lines.number;
    current[j] = {re, im};
    prev = j;
  }
  flush();
  return blocks;
}

void check_stream(const std::ostream& os, const std::filesystem::path& path) {
  if (!os) throw IoError("failed writing " + path.string());
}

}  // namespace

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_coefficients(std::ostream& os, const PeriodicFunction& u) {
  for (int j = -u.max_mode(); j <= u.max_mode(); ++j) {
    os << j << ' ' << fmt(u[j].real()) << ' ' << fmt(u[j].imag()) << '\n';
  }
}

std::vector<PeriodicFunction> read_coefficient_blocks(std::istream& is) {
  Lines lines(is);
  return read_blocks(lines);
}

void write_system(std::ostream& os, const MagneticSystem& sys) {
  os << "A_star " << fmt(sys.a_star()) << '\n';
  os << "# a\n";
  write_coefficients(os, sys.a());
  os << "\n# b\n";
  write_coefficients(os, sys.b());
}

MagneticSystem read_system(std::istream& is) {
  Lines lines(is);
  std::string raw;
  double a_star = 0.0;
  bool found = false;
  while (lines.next(raw)) {
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string key, rest;
    if (!(ss >> key) || key != "A_star" || !(ss >> a_star) || (ss >> rest)) {
      throw FormatError("line " + std::to_string(lines.number) + ": expected \"A_star <value>\"");
    }
    found = true;
    break;
  }
  if (!found) throw FormatError("system file: missing \"A_star\" header");
  const std::vector<PeriodicFunction> blocks = read_blocks(lines);
  if (blocks.size() != 2) {
    throw FormatError("system file: expected 2 coefficient blocks (a, b), found " +
                      std::to_string(blocks.size()));
  }
  return MagneticSystem(a_star, blocks[0], blocks[1]);
}

void write_pair(std::ostream& os, const TangentPair& t) {
  os << "# alpha\n";
  write_coefficients(os, t.alpha);
  os << "\n# beta\n";
  write_coefficients(os, t.beta);
}

TangentPair read_pair(std::istream& is) {
  std::vector<PeriodicFunction> blocks = read_coefficient_blocks(is);
  if (blocks.size() != 2) {
    throw FormatError("pair file: expected 2 coefficient blocks (alpha, beta), found " +
                      std::to_string(blocks.size()));
  }
  return {std::move(blocks[0]), std::move(blocks[1])};
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  return os;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string() + " for reading");
  return is;
}

void save_system(const std::filesystem::path& path, const MagneticSystem& sys) {
  std::ofstream os = open_out(path);
  write_system(os, sys);
  os.flush();
  check_stream(os, path);
}

MagneticSystem load_system(const std::filesystem::path& path) {
  std::ifstream is = open_in(path);
  return read_system(is);
}

void save_pair(const std::filesystem::path& path, const TangentPair& t) {
  std::ofstream os = open_out(path);
  write_pair(os, t);
  os.flush();
  check_stream(os, path);
}

TangentPair load_pair(const std::filesystem::path& path) {
  std::ifstream is = open_in(path);
  return read_pair(is);
}

void write_operator(std::ostream& os, const SpectralOperator& op, int K, int n_cut) {
  os << K << ' ' << n_cut << '\n';
  for (std::size_t r = 0; r < op.row_modes.size(); ++r) {
    for (std::size_t c = 0; c < op.col_modes.size(); ++c) {
      const cplx v = op.entries(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      os << op.row_modes[r] << ' ' << op.col_modes[c] << ' ' << fmt(v.real()) << ' '
         << fmt(v.imag()) << '\n';
    }
  }
}

void write_action_csv(std::ostream& os, const ActionResult& action, int n) {
  os << "I,S,Delta\n";
  for (int m = 0; m < n; ++m) {
    const double I = 2.0 * std::numbers::pi * m / n;
    os << fmt(I) << ',' << fmt(action.s_fun.eval(I)) << ',' << fmt(action.delta.eval(I)) << '\n';
  }
}

void write_orbit_csv(std::ostream& os, const OrbitRecord& orbit) {
  os << "t,x,y,phi,I\n";
  for (const OrbitSample& s : orbit.samples) {
    os << fmt(s.t) << ',' << fmt(s.state.x) << ',' << fmt(s.state.y) << ',' << fmt(s.state.phi)
       << ',' << fmt(s.I) << '\n';
  }
}

void write_displacement_csv(std::ostream& os, const DisplacementCurve& curve) {
  os << "I,Delta\n";
  for (std::size_t i = 0; i < curve.I.size(); ++i) {
    os << fmt(curve.I[i]) << ',' << fmt(curve.delta[i]) << '\n';
  }
}

void write_decay_csv(std::ostream& os, const DecayReport& report) {
  os << "band,sup\n";
  for (std::size_t i = 0; i < report.bands.size(); ++i) {
    os << report.bands[i] << ',' << fmt(report.band_sup[i]) << '\n';
  }
}

void Report::add(const std::string& key, const std::string& value) { entries_.emplace_back(key, value); }
void Report::add(const std::string& key, double value) { add(key, fmt(value)); }
void Report::add(const std::string& key, int value) { add(key, std::to_string(value)); }
void Report::add(const std::string& key, bool value) { add(key, std::string(value ? "true" : "false")); }

void Report::add(const std::string& key, const std::vector<double>& values) {
  std::string joined;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) joined += ' ';
    joined += fmt(values[i]);
  }
  add(key, joined);
}

void Report::section(const std::string& name) { entries_.emplace_back("[" + name + "]", ""); }

void Report::write(std::ostream& os) const {
  for (const auto& [k, v] : entries_) {
    if (!k.empty() && k.front() == '[') {
      os << '\n' << k << '\n';
    } else {
      os << k << " = " << v << '\n';
    }
  }
}

void Report::save(const std::filesystem::path& path) const {
  std::ofstream os = open_out(path);
  write(os);
  os.flush();
  check_stream(os, path);
}

}  // namespace zoll::io
