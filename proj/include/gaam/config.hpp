#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gaam/dynamics.hpp"

namespace gaam {

enum class SourceKind { zero, random, checkpoint };
enum class ReferenceKind { none, stationary, checkpoint };

struct ForcingSpec {
  SourceKind kind = SourceKind::random;
  std::uint64_t seed = 1;
  double amplitude = 0.05;
  std::string checkpoint_path;
};

struct InitSpec {
  SourceKind kind = SourceKind::random;
  std::uint64_t seed = 2;
  double amplitude = 0.5;
  std::string checkpoint_path;
};

struct ReferenceSpec {
  ReferenceKind kind = ReferenceKind::none;
  std::string checkpoint_path;
};

struct ToleranceSpec {
  double stationary = 1e-12;  // iterate-difference stop in H^{beta/2}
  double residual = 1e-10;    // accepted stationary L^2 residual
  double check = 1e-9;        // relative slack for bound checks
  double singleton = 1e-6;    // collapse spread at t_end
  double smallness_C = 1.0;   // generic constant of the smallness conditions
};

struct SweepSpec {
  std::vector<double> alpha{2.0};
  std::vector<double> beta{2.0, 0.5, 0.0};
  std::vector<double> gamma{1.0};
  std::vector<double> nu{1.0};
  std::vector<double> delta{1.0};
  std::vector<double> f_amplitude{0.05};
  int n_starts = 3;
};

// Flat key=value run configuration with section prefixes
// (model., sim., force., init., ref., tol., sweep.).
struct RunConfig {
  ModelParams<double> model;
  SimulationConfig<double> sim;
  ForcingSpec force;
  InitSpec init;
  ReferenceSpec ref;
  ToleranceSpec tol;
  SweepSpec sweep;
};

namespace detail {

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string fmt_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += fmt_double(v[i]);
  }
  return out;
}

inline double parse_double(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: bad numeric value for " + key + ": '" + s + "'");
  }
}

inline long parse_long(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    const long v = std::stol(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: bad integer value for " + key + ": '" + s + "'");
  }
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: bad seed value for " + key + ": '" + s + "'");
  }
}

inline bool parse_bool(const std::string& key, const std::string& s) {
  if (s == "1" || s == "true") return true;
  if (s == "0" || s == "false") return false;
  throw ConfigError("config: bad boolean value for " + key + ": '" + s + "'");
}

inline std::vector<double> parse_list(const std::string& key, const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, item));
  if (out.empty()) throw ConfigError("config: empty list for " + key);
  return out;
}

inline SourceKind parse_source_kind(const std::string& key, const std::string& s) {
  if (s == "zero") return SourceKind::zero;
  if (s == "random") return SourceKind::random;
  if (s == "checkpoint") return SourceKind::checkpoint;
  throw ConfigError("config: bad kind for " + key + ": '" + s + "'");
}

inline const char* to_string(SourceKind k) {
  switch (k) {
    case SourceKind::zero: return "zero";
    case SourceKind::random: return "random";
    case SourceKind::checkpoint: return "checkpoint";
  }
  return "?";
}

inline ReferenceKind parse_ref_kind(const std::string& key, const std::string& s) {
  if (s == "none") return ReferenceKind::none;
  if (s == "stationary") return ReferenceKind::stationary;
  if (s == "checkpoint") return ReferenceKind::checkpoint;
  throw ConfigError("config: bad kind for " + key + ": '" + s + "'");
}

inline const char* to_string(ReferenceKind k) {
  switch (k) {
    case ReferenceKind::none: return "none";
    case ReferenceKind::stationary: return "stationary";
    case ReferenceKind::checkpoint: return "checkpoint";
  }
  return "?";
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

inline std::string serialize_config(const RunConfig& c) {
  using detail::fmt_double;
  using detail::fmt_list;
  std::ostringstream out;
  out << "model.alpha = " << fmt_double(c.model.alpha) << "\n";
  out << "model.beta = " << fmt_double(c.model.beta) << "\n";
  out << "model.gamma = " << fmt_double(c.model.gamma) << "\n";
  out << "model.delta = " << fmt_double(c.model.delta) << "\n";
  out << "model.nu = " << fmt_double(c.model.nu) << "\n";
  out << "model.dim = " << c.model.dim << "\n";
  out << "model.modes_per_axis = " << c.model.modes_per_axis << "\n";
  out << "model.box_length = " << fmt_double(c.model.box_length) << "\n";
  out << "sim.dt = " << fmt_double(c.sim.dt) << "\n";
  out << "sim.t_end = " << fmt_double(c.sim.t_end) << "\n";
  out << "sim.record_stride = " << c.sim.record_stride << "\n";
  out << "sim.mollifier_epsilon = " << fmt_double(c.sim.mollifier_epsilon) << "\n";
  out << "sim.nonlinearity_enabled = " << (c.sim.nonlinearity_enabled ? 1 : 0) << "\n";
  out << "sim.seed = " << c.sim.seed << "\n";
  out << "force.kind = " << detail::to_string(c.force.kind) << "\n";
  out << "force.seed = " << c.force.seed << "\n";
  out << "force.amplitude = " << fmt_double(c.force.amplitude) << "\n";
  out << "force.checkpoint = " << c.force.checkpoint_path << "\n";
  out << "init.kind = " << detail::to_string(c.init.kind) << "\n";
  out << "init.seed = " << c.init.seed << "\n";
  out << "init.amplitude = " << fmt_double(c.init.amplitude) << "\n";
  out << "init.checkpoint = " << c.init.checkpoint_path << "\n";
  out << "ref.kind = " << detail::to_string(c.ref.kind) << "\n";
  out << "ref.checkpoint = " << c.ref.checkpoint_path << "\n";
  out << "tol.stationary = " << fmt_double(c.tol.stationary) << "\n";
  out << "tol.residual = " << fmt_double(c.tol.residual) << "\n";
  out << "tol.check = " << fmt_double(c.tol.check) << "\n";
  out << "tol.singleton = " << fmt_double(c.tol.singleton) << "\n";
  out << "tol.C = " << fmt_double(c.tol.smallness_C) << "\n";
  out << "sweep.alpha = " << fmt_list(c.sweep.alpha) << "\n";
  out << "sweep.beta = " << fmt_list(c.sweep.beta) << "\n";
  out << "sweep.gamma = " << fmt_list(c.sweep.gamma) << "\n";
  out << "sweep.nu = " << fmt_list(c.sweep.nu) << "\n";
  out << "sweep.delta = " << fmt_list(c.sweep.delta) << "\n";
  out << "sweep.f_amplitude = " << fmt_list(c.sweep.f_amplitude) << "\n";
  out << "sweep.n_starts = " << c.sweep.n_starts << "\n";
  return out.str();
}

inline RunConfig parse_config(const std::string& text) {
  using namespace detail;
  RunConfig c;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: expected key = value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));

    if (key == "model.alpha") c.model.alpha = parse_double(key, val);
    else if (key == "model.beta") c.model.beta = parse_double(key, val);
    else if (key == "model.gamma") c.model.gamma = parse_double(key, val);
    else if (key == "model.delta") c.model.delta = parse_double(key, val);
    else if (key == "model.nu") c.model.nu = parse_double(key, val);
    else if (key == "model.dim") c.model.dim = int(parse_long(key, val));
    else if (key == "model.modes_per_axis") c.model.modes_per_axis = int(parse_long(key, val));
    else if (key == "model.box_length") c.model.box_length = parse_double(key, val);
    else if (key == "sim.dt") c.sim.dt = parse_double(key, val);
    else if (key == "sim.t_end") c.sim.t_end = parse_double(key, val);
    else if (key == "sim.record_stride") c.sim.record_stride = int(parse_long(key, val));
    else if (key == "sim.mollifier_epsilon") c.sim.mollifier_epsilon = parse_double(key, val);
    else if (key == "sim.nonlinearity_enabled") c.sim.nonlinearity_enabled = parse_bool(key, val);
    else if (key == "sim.seed") c.sim.seed = parse_u64(key, val);
    else if (key == "force.kind") c.force.kind = parse_source_kind(key, val);
    else if (key == "force.seed") c.force.seed = parse_u64(key, val);
    else if (key == "force.amplitude") c.force.amplitude = parse_double(key, val);
    else if (key == "force.checkpoint") c.force.checkpoint_path = val;
    else if (key == "init.kind") c.init.kind = parse_source_kind(key, val);
    else if (key == "init.seed") c.init.seed = parse_u64(key, val);
    else if (key == "init.amplitude") c.init.amplitude = parse_double(key, val);
    else if (key == "init.checkpoint") c.init.checkpoint_path = val;
    else if (key == "ref.kind") c.ref.kind = parse_ref_kind(key, val);
    else if (key == "ref.checkpoint") c.ref.checkpoint_path = val;
    else if (key == "tol.stationary") c.tol.stationary = parse_double(key, val);
    else if (key == "tol.residual") c.tol.residual = parse_double(key, val);
    else if (key == "tol.check") c.tol.check = parse_double(key, val);
    else if (key == "tol.singleton") c.tol.singleton = parse_double(key, val);
    else if (key == "tol.C") c.tol.smallness_C = parse_double(key, val);
    else if (key == "sweep.alpha") c.sweep.alpha = parse_list(key, val);
    else if (key == "sweep.beta") c.sweep.beta = parse_list(key, val);
    else if (key == "sweep.gamma") c.sweep.gamma = parse_list(key, val);
    else if (key == "sweep.nu") c.sweep.nu = parse_list(key, val);
    else if (key == "sweep.delta") c.sweep.delta = parse_list(key, val);
    else if (key == "sweep.f_amplitude") c.sweep.f_amplitude = parse_list(key, val);
    else if (key == "sweep.n_starts") c.sweep.n_starts = int(parse_long(key, val));
    else throw ConfigError("config: unknown key '" + key + "'");
  }
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_config(text);
}

}  // namespace gaam
