#include "zoll/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>

#include "zoll/errors.hpp"

namespace zoll {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  std::size_t used = 0;
  try {
    if constexpr (std::is_same_v<T, double>) {
      out = std::stod(value, &used);
    } else if constexpr (std::is_same_v<T, int>) {
      out = std::stoi(value, &used);
    } else {
      out = static_cast<T>(std::stoull(value, &used));
    }
  } catch (const std::exception&) {
    throw FormatError("config: bad value for " + key + ": \"" + value + "\"");
  }
  if (used != value.size()) throw FormatError("config: bad value for " + key + ": \"" + value + "\"");
  return out;
}

}  // namespace

void RunConfig::validate() const {
  if (!(a_star > 0.0)) throw InvalidArgument("config: a_star must be positive");
  solve.validate();
  if (direction_file.empty() && kernel_mode == 0) {
    throw InvalidArgument("config: kernel_mode must be nonzero");
  }
  if (!(amplitude > 0.0)) throw InvalidArgument("config: amplitude must be positive");
  if (!(tau_max != 0.0) || !std::isfinite(tau_max)) throw InvalidArgument("config: tau_max must be nonzero");
  if (tau_steps < 1) throw InvalidArgument("config: tau_steps must be positive");
  if (verify_levels < 1) throw InvalidArgument("config: verify_levels must be positive");
  if (!(verify_tol > 0.0)) throw InvalidArgument("config: verify_tol must be positive");
}

RunConfig parse_config(std::istream& is) {
  RunConfig cfg;
  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> setters{
      {"a_star", [&](auto& k, auto& v) { cfg.a_star = parse_number<double>(k, v); }},
      {"K", [&](auto& k, auto& v) { cfg.solve.K = parse_number<int>(k, v); }},
      {"M", [&](auto& k, auto& v) { cfg.solve.M = parse_number<int>(k, v); }},
      {"tol", [&](auto& k, auto& v) { cfg.solve.tol = parse_number<double>(k, v); }},
      {"s_residual", [&](auto& k, auto& v) { cfg.solve.s_residual = parse_number<double>(k, v); }},
      {"max_iter", [&](auto& k, auto& v) { cfg.solve.max_iter = parse_number<int>(k, v); }},
      {"damping", [&](auto& k, auto& v) { cfg.solve.damping = parse_number<double>(k, v); }},
      {"pair_modes", [&](auto& k, auto& v) { cfg.solve.pair_modes = parse_number<int>(k, v); }},
      {"nash_moser_n0", [&](auto& k, auto& v) { cfg.solve.nash_moser_n0 = parse_number<int>(k, v); }},
      {"max_condition", [&](auto& k, auto& v) { cfg.solve.max_condition = parse_number<double>(k, v); }},
      {"kernel_mode", [&](auto& k, auto& v) { cfg.kernel_mode = parse_number<int>(k, v); }},
      {"amplitude", [&](auto& k, auto& v) { cfg.amplitude = parse_number<double>(k, v); }},
      {"direction_file", [&](auto&, auto& v) { cfg.direction_file = v; }},
      {"tau_max", [&](auto& k, auto& v) { cfg.tau_max = parse_number<double>(k, v); }},
      {"tau_steps", [&](auto& k, auto& v) { cfg.tau_steps = parse_number<int>(k, v); }},
      {"tau_spacing",
       [&](auto& k, auto& v) {
         if (v == "geometric") {
           cfg.tau_spacing = TauSpacing::Geometric;
         } else if (v == "linear") {
           cfg.tau_spacing = TauSpacing::Linear;
         } else {
           throw FormatError("config: " + k + " must be geometric or linear");
         }
       }},
      {"out_dir", [&](auto&, auto& v) { cfg.out_dir = v; }},
      {"seed", [&](auto& k, auto& v) { cfg.seed = parse_number<std::uint64_t>(k, v); }},
      {"verify_levels", [&](auto& k, auto& v) { cfg.verify_levels = parse_number<int>(k, v); }},
      {"verify_tol", [&](auto& k, auto& v) { cfg.verify_tol = parse_number<double>(k, v); }},
  };

  std::set<std::string> seen;
  std::string raw;
  int number = 0;
  while (std::getline(is, raw)) {
    ++number;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw FormatError("config line " + std::to_string(number) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) {
      throw FormatError("config line " + std::to_string(number) + ": unknown key \"" + key + "\"");
    }
    if (!seen.insert(key).second) {
      throw FormatError("config line " + std::to_string(number) + ": repeated key \"" + key + "\"");
    }
    if (value.empty()) {
      throw FormatError("config line " + std::to_string(number) + ": empty value for " + key);
    }
    it->second(key, value);
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config " + path.string());
  RunConfig cfg = parse_config(is);
  if (!cfg.direction_file.empty() && std::filesystem::path(cfg.direction_file).is_relative()) {
    cfg.direction_file = (path.parent_path() / cfg.direction_file).string();
  }
  return cfg;
}

}  // namespace zoll
