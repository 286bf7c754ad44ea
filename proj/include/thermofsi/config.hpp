#pragma once

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "thermofsi/forcing.hpp"
#include "thermofsi/geometry.hpp"
#include "thermofsi/integrator.hpp"
#include "thermofsi/limits.hpp"
#include "thermofsi/params.hpp"

namespace thermofsi {

inline constexpr const char* kVersion = "0.1.0";

/// Effective run configuration after defaults and overrides.
struct RunConfig {
  bool from_physical = false;
  PhysicalParams physical;
  DimensionlessParams params;

  int dim = 1;
  int n = 8;
  Layout layout = SolidSlab{4};

  ForcingSpec forcing;
  InitialData initial;

  std::string mode = "solve";
  double dt = 0.01;
  std::string output_dir = "out";
  std::uint64_t seed = 1;
  SolverBackend solver = SolverBackend::Direct;
  bool dump_state = false;
  bool dump_matrices = false;

  SweepMode sweep_mode = SweepMode::IncompBoth;
  std::vector<double> alphas{1e2, 1e3, 1e4, 1e5};
  double alpha_p0 = 1.0;
  double alpha_eta0 = 1.0;
  PressureGauge gauge = PressureGauge::VolumeCompatible;
  unsigned threads = 0;

  int selftest_configs = 50;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::string unquote(const std::string& s) {
  const std::string t = trim(s);
  if (t.size() >= 2 && ((t.front() == '"' && t.back() == '"') || (t.front() == '\'' && t.back() == '\'')))
    return t.substr(1, t.size() - 2);
  return t;
}

inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
}

inline long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long x = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
  }
}

inline bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

inline std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

inline std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt_double(v[i]);
  return s;
}

using FieldRef = std::pair<const char*, double*>;

inline std::vector<FieldRef> physical_fields(PhysicalParams& p) {
  return {{"kappa_s", &p.kappa_s},   {"kappa_f", &p.kappa_f},     {"nu", &p.nu},
          {"mu", &p.mu},             {"eta", &p.eta},             {"lambda", &p.lambda},
          {"gamma_s", &p.gamma_s},   {"rho_s", &p.rho_s},         {"rho_f", &p.rho_f},
          {"c_frho", &p.c_frho},     {"c_frhorho", &p.c_frhorho}, {"c_frhotheta", &p.c_frhotheta},
          {"c_svv", &p.c_svv},       {"c_fvv", &p.c_fvv},         {"L0", &p.L0},
          {"tau0", &p.tau0},         {"g", &p.g},                 {"p0", &p.p0},
          {"rho0", &p.rho0},         {"theta0", &p.theta0},       {"theta_star", &p.theta_star},
          {"t_final", &p.t_final}};
}

inline std::vector<FieldRef> dimensionless_fields(DimensionlessParams& d) {
  return {{"alpha_tau", &d.alpha_tau},       {"alpha_F", &d.alpha_F},
          {"alpha_nu", &d.alpha_nu},         {"alpha_eta", &d.alpha_eta},
          {"alpha_lambda", &d.alpha_lambda}, {"alpha_p", &d.alpha_p},
          {"alpha_mu", &d.alpha_mu},         {"alpha_theta_s", &d.alpha_theta_s},
          {"alpha_theta_f", &d.alpha_theta_f}, {"c_pf", &d.c_pf},
          {"c_ps", &d.c_ps},                 {"rho_s", &d.rho_s},
          {"rho_f", &d.rho_f},               {"kappa_s", &d.kappa_s},
          {"kappa_f", &d.kappa_f}};
}

inline std::string body_name(BodyForce::Kind k) {
  switch (k) {
    case BodyForce::Kind::Zero: return "zero";
    case BodyForce::Kind::Gravity: return "gravity";
    case BodyForce::Kind::Swirl: return "swirl";
    case BodyForce::Kind::Custom: return "custom";
  }
  return "zero";
}

}  // namespace detail

/// Flat "section.key" → value map. Section names are the INI sections.
using ConfigEntries = std::map<std::string, std::string>;

inline ConfigEntries read_entries(std::istream& in) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.message() + " at line " + std::to_string(e.line()));
  }
  ConfigEntries out;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("config: key '" + section + "' outside of a section");
    for (const auto& [key, value] : body)
      out[section + "." + detail::trim(key)] = detail::unquote(value.data());
  }
  return out;
}

/// Applies "section.key=value" overrides.
inline void apply_overrides(ConfigEntries& e, const std::vector<std::string>& sets) {
  for (const std::string& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || s.find('.') == std::string::npos || s.find('.') > eq)
      throw ConfigError("--set: expected section.key=value, got '" + s + "'");
    e[detail::trim(s.substr(0, eq))] = detail::unquote(s.substr(eq + 1));
  }
}

/// Interprets the entries; unknown keys are rejected by name.
inline RunConfig interpret(const ConfigEntries& entries) {
  using namespace detail;
  RunConfig c;
  std::map<std::string, bool> used;
  auto has = [&](const std::string& k) { return entries.count(k) > 0; };
  auto get = [&](const std::string& k) -> const std::string& {
    used[k] = true;
    return entries.at(k);
  };

  bool any_phys = false, any_dimless = false;
  for (const auto& [k, v] : entries) {
    any_phys |= k.rfind("params.physical.", 0) == 0;
    any_dimless |= k.rfind("params.dimensionless.", 0) == 0;
  }
  if (any_phys && any_dimless)
    throw ConfigError("params: use either physical.* or dimensionless.* keys, not both");
  c.from_physical = any_phys;
  if (any_phys) {
    for (auto [name, ptr] : physical_fields(c.physical)) {
      const std::string k = std::string("params.physical.") + name;
      if (has(k)) *ptr = to_double(k, get(k));
      else if (std::string(name) != "t_final") throw ConfigError(k + ": missing");
    }
    c.params = nondimensionalize(c.physical);
  } else {
    for (auto [name, ptr] : dimensionless_fields(c.params)) {
      const std::string k = std::string("params.dimensionless.") + name;
      if (has(k)) *ptr = to_double(k, get(k));
    }
  }

  if (has("geometry.dim")) c.dim = static_cast<int>(to_int("geometry.dim", get("geometry.dim")));
  if (has("geometry.n")) c.n = static_cast<int>(to_int("geometry.n", get("geometry.n")));
  c.layout = SolidSlab{c.n / 2};
  if (has("geometry.layout")) {
    try {
      c.layout = parse_layout(get("geometry.layout"), c.dim);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("geometry.layout: ") + e.what());
    }
  }

  if (has("forcing.body")) {
    const std::string b = get("forcing.body");
    if (b == "zero") c.forcing.body.kind = BodyForce::Kind::Zero;
    else if (b == "gravity") c.forcing.body.kind = BodyForce::Kind::Gravity;
    else if (b == "swirl") c.forcing.body.kind = BodyForce::Kind::Swirl;
    else throw ConfigError("forcing.body: unknown preset '" + b + "'");
  }
  if (has("forcing.g")) c.forcing.body.g = to_double("forcing.g", get("forcing.g"));
  if (has("forcing.body_envelope")) c.forcing.body.envelope = parse_envelope(get("forcing.body_envelope"));
  if (has("forcing.heat")) {
    const std::string h = get("forcing.heat");
    if (h == "zero") c.forcing.heat.kind = HeatSource::Kind::Zero;
    else if (h == "bump") c.forcing.heat.kind = HeatSource::Kind::Bump;
    else throw ConfigError("forcing.heat: unknown preset '" + h + "'");
  }
  if (has("forcing.heat_center")) {
    const auto v = to_list("forcing.heat_center", get("forcing.heat_center"));
    if (v.size() > 3) throw ConfigError("forcing.heat_center: at most 3 coordinates");
    for (std::size_t i = 0; i < v.size(); ++i) c.forcing.heat.center[i] = v[i];
  }
  if (has("forcing.heat_width")) c.forcing.heat.width = to_double("forcing.heat_width", get("forcing.heat_width"));
  if (has("forcing.heat_amplitude"))
    c.forcing.heat.amplitude = to_double("forcing.heat_amplitude", get("forcing.heat_amplitude"));
  if (has("forcing.heat_envelope")) c.forcing.heat.envelope = parse_envelope(get("forcing.heat_envelope"));
  if (!(c.forcing.heat.width > 0)) throw ConfigError("forcing.heat_width: must be positive");

  if (has("initial.kind")) {
    const std::string k = get("initial.kind");
    if (k == "homogeneous") c.initial.kind = InitialData::Kind::Homogeneous;
    else if (k == "bump") c.initial.kind = InitialData::Kind::Bump;
    else throw ConfigError("initial.kind: unknown preset '" + k + "'");
  }
  for (auto [name, ptr] : {std::pair{"w_amp", &c.initial.w_amp}, std::pair{"v_amp", &c.initial.v_amp},
                           std::pair{"theta_amp", &c.initial.theta_amp}}) {
    const std::string k = std::string("initial.") + name;
    if (has(k)) *ptr = to_double(k, get(k));
  }

  if (has("run.mode")) {
    c.mode = get("run.mode");
    if (c.mode != "solve" && c.mode != "audit" && c.mode != "sweep" && c.mode != "c2" &&
        c.mode != "selftest")
      throw ConfigError("run.mode: expected solve, audit, sweep, c2 or selftest, got '" + c.mode + "'");
  }
  if (has("run.dt")) c.dt = to_double("run.dt", get("run.dt"));
  if (has("run.T")) c.params.T = to_double("run.T", get("run.T"));
  if (has("run.output_dir")) c.output_dir = get("run.output_dir");
  if (has("run.seed")) c.seed = static_cast<std::uint64_t>(to_int("run.seed", get("run.seed")));
  if (has("run.solver")) {
    const std::string s = get("run.solver");
    if (s == "direct") c.solver = SolverBackend::Direct;
    else if (s == "iterative") c.solver = SolverBackend::Iterative;
    else throw ConfigError("run.solver: expected direct or iterative, got '" + s + "'");
  }
  if (has("run.dump_state")) c.dump_state = to_bool("run.dump_state", get("run.dump_state"));
  if (has("run.dump_matrices")) c.dump_matrices = to_bool("run.dump_matrices", get("run.dump_matrices"));

  if (has("sweep.mode")) {
    try {
      c.sweep_mode = parse_mode(get("sweep.mode"));
    } catch (const ConfigError&) {
      throw ConfigError("sweep.mode: unknown mode '" + entries.at("sweep.mode") + "'");
    }
  }
  if (has("sweep.alphas")) c.alphas = to_list("sweep.alphas", get("sweep.alphas"));
  if (has("sweep.alpha_p0")) c.alpha_p0 = to_double("sweep.alpha_p0", get("sweep.alpha_p0"));
  if (has("sweep.alpha_eta0")) c.alpha_eta0 = to_double("sweep.alpha_eta0", get("sweep.alpha_eta0"));
  if (has("sweep.gauge")) {
    const std::string g = get("sweep.gauge");
    if (g == "volume") c.gauge = PressureGauge::VolumeCompatible;
    else if (g == "literal") c.gauge = PressureGauge::Literal;
    else throw ConfigError("sweep.gauge: expected volume or literal, got '" + g + "'");
  }
  if (has("sweep.threads")) c.threads = static_cast<unsigned>(to_int("sweep.threads", get("sweep.threads")));
  if (has("selftest.configs"))
    c.selftest_configs = static_cast<int>(to_int("selftest.configs", get("selftest.configs")));

  for (const auto& [k, v] : entries)
    if (!used.count(k)) throw ConfigError(k + ": unknown key");

  // cross-field validation
  const ValidationReport vr = validate(c.params);
  if (!vr.ok()) throw ConfigError("params: nonpositive field " + vr.nonpositive.front());
  if (!(c.dt > 0)) throw ConfigError("run.dt: must be positive");
  step_count(c.params.T, c.dt);
  try {
    build_geometry(c.dim, c.n, c.layout);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("geometry: ") + e.what());
  }
  return c;
}

/// Canonical entries describing `c`; interpret(to_entries(c)) reproduces c.
inline ConfigEntries to_entries(const RunConfig& c) {
  using namespace detail;
  ConfigEntries e;
  RunConfig m = c;
  if (c.from_physical) {
    for (auto [name, ptr] : physical_fields(m.physical))
      e[std::string("params.physical.") + name] = fmt_double(*ptr);
  } else {
    for (auto [name, ptr] : dimensionless_fields(m.params))
      e[std::string("params.dimensionless.") + name] = fmt_double(*ptr);
  }
  e["geometry.dim"] = std::to_string(c.dim);
  e["geometry.n"] = std::to_string(c.n);
  e["geometry.layout"] = format_layout(c.layout, c.dim);
  e["forcing.body"] = body_name(c.forcing.body.kind);
  e["forcing.g"] = fmt_double(c.forcing.body.g);
  e["forcing.body_envelope"] = format_envelope(c.forcing.body.envelope);
  e["forcing.heat"] = c.forcing.heat.kind == HeatSource::Kind::Bump ? "bump" : "zero";
  e["forcing.heat_center"] = join({c.forcing.heat.center[0], c.forcing.heat.center[1], c.forcing.heat.center[2]});
  e["forcing.heat_width"] = fmt_double(c.forcing.heat.width);
  e["forcing.heat_amplitude"] = fmt_double(c.forcing.heat.amplitude);
  e["forcing.heat_envelope"] = format_envelope(c.forcing.heat.envelope);
  e["initial.kind"] = c.initial.kind == InitialData::Kind::Bump ? "bump" : "homogeneous";
  e["initial.w_amp"] = fmt_double(c.initial.w_amp);
  e["initial.v_amp"] = fmt_double(c.initial.v_amp);
  e["initial.theta_amp"] = fmt_double(c.initial.theta_amp);
  e["run.mode"] = c.mode;
  e["run.dt"] = fmt_double(c.dt);
  e["run.T"] = fmt_double(c.params.T);
  e["run.output_dir"] = c.output_dir;
  e["run.seed"] = std::to_string(c.seed);
  e["run.solver"] = c.solver == SolverBackend::Direct ? "direct" : "iterative";
  e["run.dump_state"] = c.dump_state ? "true" : "false";
  e["run.dump_matrices"] = c.dump_matrices ? "true" : "false";
  e["sweep.mode"] = mode_name(c.sweep_mode);
  e["sweep.alphas"] = join(c.alphas);
  e["sweep.alpha_p0"] = fmt_double(c.alpha_p0);
  e["sweep.alpha_eta0"] = fmt_double(c.alpha_eta0);
  e["sweep.gauge"] = c.gauge == PressureGauge::VolumeCompatible ? "volume" : "literal";
  e["sweep.threads"] = std::to_string(c.threads);
  e["selftest.configs"] = std::to_string(c.selftest_configs);
  return e;
}

/// Renders entries as sections with quoted string values.
inline std::string render_entries(const ConfigEntries& e) {
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections;
  for (const auto& [k, v] : e) {
    const auto dot = k.find('.');
    sections[k.substr(0, dot)].emplace_back(k.substr(dot + 1), v);
  }
  std::ostringstream out;
  bool first = true;
  for (const auto& [name, kv] : sections) {
    if (!first) out << "\n";
    first = false;
    out << "[" << name << "]\n";
    for (const auto& [k, v] : kv) {
      const bool numeric = !v.empty() && v.find_first_not_of("0123456789+-.eE") == std::string::npos;
      const bool plain = numeric || v == "true" || v == "false";
      out << k << " = " << (plain ? v : "\"" + v + "\"") << "\n";
    }
  }
  return out.str();
}

/// FNV-1a 64-bit digest.
inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

/// Hash of the canonical config, excluding the output directory.
inline std::string config_hash(const RunConfig& c) {
  ConfigEntries e = to_entries(c);
  e.erase("run.output_dir");
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(render_entries(e))));
  return buf;
}

inline RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {}) {
  std::istringstream in(text);
  ConfigEntries e = read_entries(in);
  apply_overrides(e, overrides);
  return interpret(e);
}

inline RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read '" + path + "'");
  ConfigEntries e = read_entries(in);
  apply_overrides(e, overrides);
  return interpret(e);
}

}  // namespace thermofsi
