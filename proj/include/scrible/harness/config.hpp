#ifndef SCRIBLE_HARNESS_CONFIG_HPP
#define SCRIBLE_HARNESS_CONFIG_HPP

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "scrible/error.hpp"
#include "scrible/learner.hpp"

namespace scrible::harness {

inline const char* const kAlgorithm1 = "algorithm1";
inline const char* const kBaseline = "scrible_baseline";

/// Shortest decimal text that parses back to the same double.
inline std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

struct ExperimentConfig {
  int T = 2000;
  int d = 5;
  std::string domain = "ball";  // ball | box
  double D = 5.0;               // ball radius
  /// Box half-widths; empty means D in every coordinate, one value means a cube.
  std::vector<double> halfwidths;
  double G = 3.0;
  std::optional<double> C;  // nullopt: auto
  double epsilon = 0.0;
  std::optional<double> delta;  // nullopt: auto
  std::variant<EtaPreset, double> eta = EtaPreset::kTheorem1;
  std::string perturbation = "none";  // none | sinusoidal | spikes
  double offset = 0.0;
  double boundary_threshold = 0.95;
  std::optional<double> sigma_cap;  // nullopt: 1 + offset
  std::map<int, double> spikes;
  int reps = 1;
  std::uint64_t master_seed = 0;
  std::vector<std::string> algorithms{kAlgorithm1, kBaseline};
  double gamma = 0.05;
  std::string out_dir = "out";
  bool allow_regime_violation = false;
  bool verify_lemma4 = false;

  bool operator==(const ExperimentConfig&) const = default;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

inline double parse_real(const std::string& key, const std::string& v) {
  if (v.empty()) throw ConfigError(key + ": expected a number");
  errno = 0;
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end != v.c_str() + v.size() || errno == ERANGE || std::isnan(x))
    throw ConfigError(key + ": '" + v + "' is not a number");
  return x;
}

inline long long parse_integer(const std::string& key, const std::string& v) {
  long long x = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw ConfigError(key + ": '" + v + "' is not an integer");
  return x;
}

inline int parse_int(const std::string& key, const std::string& v) {
  const long long x = parse_integer(key, v);
  if (x < -2147483647LL || x > 2147483647LL) throw ConfigError(key + ": out of range");
  return static_cast<int>(x);
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::uint64_t x = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw ConfigError(key + ": '" + v + "' is not an unsigned 64-bit integer");
  return x;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

inline const char* preset_name(EtaPreset p) {
  switch (p) {
    case EtaPreset::kTheorem1: return "theorem1";
    case EtaPreset::kPaperSec7: return "paper_sec7";
    case EtaPreset::kTheorem2Proof: return "theorem2_proof";
  }
  return "theorem1";
}

inline std::optional<EtaPreset> preset_from_name(const std::string& s) {
  if (s == "theorem1") return EtaPreset::kTheorem1;
  if (s == "paper_sec7") return EtaPreset::kPaperSec7;
  if (s == "theorem2_proof") return EtaPreset::kTheorem2Proof;
  return std::nullopt;
}

inline void set_key(ExperimentConfig& c, const std::string& key, const std::string& v) {
  if (key == "T") c.T = parse_int(key, v);
  else if (key == "d") c.d = parse_int(key, v);
  else if (key == "domain") c.domain = v;
  else if (key == "D") c.D = parse_real(key, v);
  else if (key == "halfwidths") {
    c.halfwidths.clear();
    if (!v.empty())
      for (const auto& item : split(v, ',')) c.halfwidths.push_back(parse_real(key, item));
  } else if (key == "G") c.G = parse_real(key, v);
  else if (key == "C") c.C = v == "auto" ? std::nullopt : std::optional<double>(parse_real(key, v));
  else if (key == "epsilon") c.epsilon = parse_real(key, v);
  else if (key == "delta") c.delta = v == "auto" ? std::nullopt : std::optional<double>(parse_real(key, v));
  else if (key == "eta") {
    if (const auto p = preset_from_name(v)) c.eta = *p;
    else c.eta = parse_real(key, v);
  } else if (key == "perturbation") c.perturbation = v;
  else if (key == "offset") c.offset = parse_real(key, v);
  else if (key == "boundary_threshold") c.boundary_threshold = parse_real(key, v);
  else if (key == "sigma_cap") {
    if (v == "auto") c.sigma_cap.reset();
    else if (v == "none") c.sigma_cap = std::numeric_limits<double>::infinity();
    else c.sigma_cap = parse_real(key, v);
  } else if (key == "spikes") {
    c.spikes.clear();
    if (!v.empty()) {
      for (const auto& item : split(v, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw ConfigError("spikes: expected round:magnitude, got '" + item + "'");
        const int t = parse_int(key, trim(item.substr(0, colon)));
        if (!c.spikes.emplace(t, parse_real(key, trim(item.substr(colon + 1)))).second)
          throw ConfigError("spikes: round " + std::to_string(t) + " listed twice");
      }
    }
  } else if (key == "reps") c.reps = parse_int(key, v);
  else if (key == "master_seed") c.master_seed = parse_u64(key, v);
  else if (key == "algorithms") {
    c.algorithms.clear();
    if (!v.empty()) c.algorithms = split(v, ',');
  } else if (key == "gamma") c.gamma = parse_real(key, v);
  else if (key == "out_dir") c.out_dir = v;
  else if (key == "allow_regime_violation") c.allow_regime_violation = parse_bool(key, v);
  else if (key == "verify_lemma4") c.verify_lemma4 = parse_bool(key, v);
  else throw ConfigError("unknown key '" + key + "'");
}

}  // namespace detail

inline void validate(const ExperimentConfig& c) {
  if (c.T < 1) throw ConfigError("T must be >= 1");
  if (c.d < 1) throw ConfigError("d must be >= 1");
  if (c.reps < 1) throw ConfigError("reps must be >= 1");
  if (c.domain != "ball" && c.domain != "box") throw ConfigError("domain must be ball or box, got '" + c.domain + "'");
  if (!(c.D >= 1.0) || !std::isfinite(c.D)) throw ConfigError("D must be a finite value >= 1");
  if (c.domain == "box" && !c.halfwidths.empty() && c.halfwidths.size() != 1 &&
      c.halfwidths.size() != static_cast<std::size_t>(c.d))
    throw ConfigError("halfwidths must list 1 or d values");
  for (double h : c.halfwidths)
    if (!(h >= 1.0) || !std::isfinite(h)) throw ConfigError("halfwidths must be finite values >= 1");
  if (!(c.G >= 0.0) || !std::isfinite(c.G)) throw ConfigError("G must be >= 0");
  if (c.C && (!(*c.C >= 0.0) || !std::isfinite(*c.C))) throw ConfigError("C must be >= 0 or auto");
  if (!(c.epsilon >= 0.0) || !std::isfinite(c.epsilon)) throw ConfigError("epsilon must be >= 0");
  if (c.delta && !(*c.delta >= 0.0 && *c.delta <= kMaxShrink)) throw ConfigError("delta must lie in [0, 2/3] or be auto");
  if (const double* e = std::get_if<double>(&c.eta); e && (!(*e > 0.0) || !std::isfinite(*e)))
    throw ConfigError("eta must be a positive number or a preset name");
  if (c.perturbation != "none" && c.perturbation != "sinusoidal" && c.perturbation != "spikes")
    throw ConfigError("perturbation must be none, sinusoidal or spikes, got '" + c.perturbation + "'");
  if (!std::isfinite(c.offset)) throw ConfigError("offset must be finite");
  if (!(c.boundary_threshold > 0.0 && c.boundary_threshold <= 1.0)) throw ConfigError("boundary_threshold must lie in (0, 1]");
  if (c.sigma_cap && !(*c.sigma_cap >= 0.0)) throw ConfigError("sigma_cap must be >= 0, auto or none");
  for (const auto& [t, m] : c.spikes) {
    if (t < 1 || t > c.T) throw ConfigError("spikes: round " + std::to_string(t) + " outside 1..T");
    if (!std::isfinite(m)) throw ConfigError("spikes: magnitudes must be finite");
  }
  if (c.algorithms.empty()) throw ConfigError("algorithms must name at least one algorithm");
  std::set<std::string> seen;
  for (const auto& a : c.algorithms) {
    if (a != kAlgorithm1 && a != kBaseline) throw ConfigError("unknown algorithm '" + a + "'");
    if (!seen.insert(a).second) throw ConfigError("algorithm '" + a + "' listed twice");
  }
  if (!(c.gamma > 0.0 && c.gamma < 1.0)) throw ConfigError("gamma must lie in (0, 1)");
  if (c.out_dir.empty()) throw ConfigError("out_dir must not be empty");
}

/// Parses `key = value` lines ('#' starts a comment) on top of `base`.
inline ExperimentConfig parse_config(const std::string& text, ExperimentConfig base = {}) {
  std::istringstream in(text);
  std::string line;
  std::set<std::string> seen;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (!seen.insert(key).second) throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    try {
      detail::set_key(base, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  validate(base);
  return base;
}

inline ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str(), std::move(base));
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

inline std::string serialize_config(const ExperimentConfig& c, bool include_out_dir = true) {
  auto join_reals = [](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt_double(v[i]);
    return s;
  };
  std::ostringstream o;
  o << "T = " << c.T << "\n";
  o << "d = " << c.d << "\n";
  o << "domain = " << c.domain << "\n";
  o << "D = " << fmt_double(c.D) << "\n";
  o << "halfwidths = " << join_reals(c.halfwidths) << "\n";
  o << "G = " << fmt_double(c.G) << "\n";
  o << "C = " << (c.C ? fmt_double(*c.C) : "auto") << "\n";
  o << "epsilon = " << fmt_double(c.epsilon) << "\n";
  o << "delta = " << (c.delta ? fmt_double(*c.delta) : "auto") << "\n";
  if (const auto* p = std::get_if<EtaPreset>(&c.eta)) o << "eta = " << detail::preset_name(*p) << "\n";
  else o << "eta = " << fmt_double(std::get<double>(c.eta)) << "\n";
  o << "perturbation = " << c.perturbation << "\n";
  o << "offset = " << fmt_double(c.offset) << "\n";
  o << "boundary_threshold = " << fmt_double(c.boundary_threshold) << "\n";
  if (!c.sigma_cap) o << "sigma_cap = auto\n";
  else if (std::isinf(*c.sigma_cap)) o << "sigma_cap = none\n";
  else o << "sigma_cap = " << fmt_double(*c.sigma_cap) << "\n";
  o << "spikes = ";
  bool first = true;
  for (const auto& [t, m] : c.spikes) {
    o << (first ? "" : ",") << t << ":" << fmt_double(m);
    first = false;
  }
  o << "\n";
  o << "reps = " << c.reps << "\n";
  o << "master_seed = " << c.master_seed << "\n";
  o << "algorithms = ";
  for (std::size_t i = 0; i < c.algorithms.size(); ++i) o << (i ? "," : "") << c.algorithms[i];
  o << "\n";
  o << "gamma = " << fmt_double(c.gamma) << "\n";
  if (include_out_dir) o << "out_dir = " << c.out_dir << "\n";
  o << "allow_regime_violation = " << (c.allow_regime_violation ? "true" : "false") << "\n";
  o << "verify_lemma4 = " << (c.verify_lemma4 ? "true" : "false") << "\n";
  return o.str();
}

/// FNV-1a over the serialized config, out_dir excluded so that relocating the
/// output does not change any artifact byte.
inline std::string config_hash(const ExperimentConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : serialize_config(c, false)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// D = 5, G = 3, d = 5, T = 2000, 10 repetitions, offset +2 near the boundary.
inline ExperimentConfig paper_sec7_config() {
  ExperimentConfig c;
  c.T = 2000;
  c.d = 5;
  c.domain = "ball";
  c.D = 5.0;
  c.G = 3.0;
  c.C.reset();
  c.epsilon = 0.0;
  c.delta.reset();
  c.eta = EtaPreset::kPaperSec7;
  c.perturbation = "sinusoidal";
  c.offset = 2.0;
  c.boundary_threshold = 0.95;
  c.reps = 10;
  c.master_seed = 20240607;
  c.gamma = 0.01;
  c.allow_regime_violation = true;
  return c;
}

}  // namespace scrible::harness

#endif  // SCRIBLE_HARNESS_CONFIG_HPP
