#include "lavaimex/scenarios.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include "lavaimex/errors.hpp"

namespace lavaimex {

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0') throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
  return x;
}

int to_int(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const long x = std::strtol(v.c_str(), &end, 10);
  if (v.empty() || *end != '\0') throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
  return static_cast<int>(x);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T, class F>
std::string join(const std::vector<T>& v, F fmt) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + fmt(v[i]);
  return out;
}

std::string discharge_name(DischargeSpec::Kind k) {
  switch (k) {
    case DischargeSpec::Kind::Constant:
      return "constant";
    case DischargeSpec::Kind::Chaotic:
      return "chaotic";
    case DischargeSpec::Kind::ChaoticNormalized:
      return "chaotic_normalized";
  }
  return "constant";
}

DischargeSpec::Kind parse_discharge(const std::string& v) {
  if (v == "constant") return DischargeSpec::Kind::Constant;
  if (v == "chaotic") return DischargeSpec::Kind::Chaotic;
  if (v == "chaotic_normalized") return DischargeSpec::Kind::ChaoticNormalized;
  throw ConfigError("unknown discharge kind '" + v + "' (expected constant, chaotic or chaotic_normalized)");
}

struct Key {
  std::string section;  // "" for top level
  std::string name;
  std::function<std::string(const ScenarioConfig&)> get;
  std::function<void(ScenarioConfig&, const std::string&)> set;
  std::function<bool(const ScenarioConfig&)> written = [](const ScenarioConfig&) { return true; };
};

bool is_vortex(const ScenarioConfig& c) { return c.kind == "vortex"; }
bool is_lake(const ScenarioConfig& c) { return c.kind == "lake-at-rest"; }
bool two_d(const ScenarioConfig& c) { return !c.is_1d(); }
bool one_d(const ScenarioConfig& c) { return c.is_1d(); }

#define LX_DOUBLE(sec, key, field, cond)                                                         \
  Key {                                                                                          \
    sec, key, [](const ScenarioConfig& c) { return g17(c.field); },                            \
        [](ScenarioConfig& c, const std::string& v) { c.field = to_double(key, v); }, cond      \
  }
#define LX_INT(sec, key, field, cond)                                                            \
  Key {                                                                                          \
    sec, key, [](const ScenarioConfig& c) { return std::to_string(c.field); },                 \
        [](ScenarioConfig& c, const std::string& v) { c.field = to_int(key, v); }, cond         \
  }
#define LX_STRING(sec, key, field, cond)                                                         \
  Key {                                                                                          \
    sec, key, [](const ScenarioConfig& c) { return c.field; },                                 \
        [](ScenarioConfig& c, const std::string& v) { c.field = v; }, cond                      \
  }

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      LX_STRING("", "name", name, [](const ScenarioConfig&) { return true; }),
      LX_STRING("", "kind", kind, [](const ScenarioConfig&) { return true; }),
      LX_STRING("", "pair", pair, [](const ScenarioConfig&) { return true; }),

      LX_INT("mesh", "nx", mesh.nx, [](const ScenarioConfig&) { return true; }),
      LX_INT("mesh", "ny", mesh.ny, two_d),
      LX_DOUBLE("mesh", "x_min", mesh.x_min, two_d),
      LX_DOUBLE("mesh", "y_min", mesh.y_min, two_d),
      LX_DOUBLE("mesh", "length_x", mesh.length_x, [](const ScenarioConfig&) { return true; }),
      LX_DOUBLE("mesh", "length_y", mesh.length_y, two_d),
      Key{"mesh", "boundary_x", [](const ScenarioConfig& c) { return boundary_name(c.mesh.boundary_x); },
          [](ScenarioConfig& c, const std::string& v) { c.mesh.boundary_x = parse_boundary(v); }, two_d},
      Key{"mesh", "boundary_y", [](const ScenarioConfig& c) { return boundary_name(c.mesh.boundary_y); },
          [](ScenarioConfig& c, const std::string& v) { c.mesh.boundary_y = parse_boundary(v); }, two_d},
      Key{"mesh", "refinements",
          [](const ScenarioConfig& c) { return join(c.mesh.refinements, [](int n) { return std::to_string(n); }); },
          [](ScenarioConfig& c, const std::string& v) {
            c.mesh.refinements.clear();
            for (const auto& s : split_list(v)) c.mesh.refinements.push_back(to_int("mesh.refinements", s));
          },
          [](const ScenarioConfig& c) { return !c.mesh.refinements.empty(); }},

      LX_DOUBLE("physics", "gravity", physics.gravity, two_d),
      Key{"physics", "nu_r", [](const ScenarioConfig& c) { return g17(c.physics.nu_r); },
          [](ScenarioConfig& c, const std::string& v) {
            c.physics.nu_r = to_double("physics.nu_r", v);
            c.nu_r_given = true;
          },
          [](const ScenarioConfig& c) { return c.nu_r_given; }},
      LX_DOUBLE("physics", "b", physics.b_coeff, two_d),
      LX_DOUBLE("physics", "T_r", physics.T_r, two_d),
      LX_DOUBLE("physics", "h_min", physics.h_min, two_d),
      LX_DOUBLE("physics", "lambda_cap", physics.lambda_cap, two_d),
      LX_DOUBLE("physics", "advection_speed", advection_speed, one_d),
      Key{"physics", "reaction_rate", [](const ScenarioConfig& c) { return join(c.reaction_rates, g17); },
          [](ScenarioConfig& c, const std::string& v) {
            c.reaction_rates.clear();
            for (const auto& s : split_list(v)) c.reaction_rates.push_back(to_double("physics.reaction_rate", s));
          },
          one_d},

      LX_DOUBLE("time", "t_final", t_final, [](const ScenarioConfig&) { return true; }),
      LX_DOUBLE("time", "dt", fixed_dt, one_d),
      LX_DOUBLE("time", "courant", time.courant, [](const ScenarioConfig&) { return true; }),
      LX_DOUBLE("time", "dt_init", time.dt_init, two_d),
      LX_DOUBLE("time", "dt_floor", time.dt_floor, two_d),
      LX_DOUBLE("time", "dt_max", time.dt_max, two_d),
      LX_INT("time", "max_steps", time.max_steps, [](const ScenarioConfig&) { return true; }),

      LX_STRING("ic", "profile", ic.profile, one_d),
      LX_DOUBLE("ic", "q0", ic.q0, one_d),
      LX_DOUBLE("ic", "zeta", ic.zeta, is_lake),
      LX_DOUBLE("ic", "hT", ic.hT, is_lake),
      LX_STRING("ic", "topography", ic.topography, two_d),
      LX_DOUBLE("ic", "h0", ic.h0, is_vortex),
      LX_DOUBLE("ic", "vortex_depth_min", ic.vortex_depth_min, is_vortex),
      LX_DOUBLE("ic", "u_inf", ic.u_inf, is_vortex),
      LX_DOUBLE("ic", "x_c", ic.x_c, is_vortex),
      LX_DOUBLE("ic", "y_c", ic.y_c, is_vortex),
      LX_DOUBLE("ic", "r0", ic.r0, is_vortex),
      LX_DOUBLE("ic", "temperature", ic.temperature, is_vortex),

      LX_STRING("output", "dir", output.dir, [](const ScenarioConfig&) { return true; }),
      LX_INT("output", "snapshot_every", output.snapshot_every, two_d),
  };
  return table;
}

#undef LX_DOUBLE
#undef LX_INT
#undef LX_STRING

const char* kVentKeys[] = {"x", "y", "sigma", "discharge", "q0", "seed", "T_e"};

void set_vent_key(VentSpec& v, const std::string& key, const std::string& value) {
  const std::string full = "vent." + key;
  if (key == "x") v.x = to_double(full, value);
  else if (key == "y") v.y = to_double(full, value);
  else if (key == "sigma") v.sigma = to_double(full, value);
  else if (key == "discharge") v.discharge.kind = parse_discharge(value);
  else if (key == "q0") v.discharge.q0 = to_double(full, value);
  else if (key == "seed") v.discharge.seed = to_double(full, value);
  else if (key == "T_e") v.T_e = to_double(full, value);
  else throw ConfigError("unknown key '" + key + "' in a [vent.N] section");
}

std::string get_vent_key(const VentSpec& v, const std::string& key) {
  if (key == "x") return g17(v.x);
  if (key == "y") return g17(v.y);
  if (key == "sigma") return g17(v.sigma);
  if (key == "discharge") return discharge_name(v.discharge.kind);
  if (key == "q0") return g17(v.discharge.q0);
  if (key == "seed") return g17(v.discharge.seed);
  return g17(v.T_e);
}

void assign(ScenarioConfig& cfg, const std::string& section, const std::string& key, const std::string& value) {
  if (section.rfind("vent.", 0) == 0) {
    const int idx = to_int("vent section index", section.substr(5));
    if (idx < 0 || idx > 63) throw ConfigError("vent index out of range in [" + section + "]");
    if (static_cast<std::size_t>(idx) >= cfg.vents.size()) cfg.vents.resize(static_cast<std::size_t>(idx) + 1);
    set_vent_key(cfg.vents[static_cast<std::size_t>(idx)], key, value);
    return;
  }
  for (const auto& k : keys())
    if (k.section == section && k.name == key) {
      k.set(cfg, value);
      return;
    }
  throw ConfigError("unknown key '" + (section.empty() ? key : section + "." + key) + "'");
}

}  // namespace

void ScenarioConfig::validate() const {
  static const std::vector<std::string> kinds = {"reaction", "advreact", "advreact-alternating",
                                                 "vortex",   "lake-at-rest", "vent"};
  if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end())
    throw ConfigError("unknown scenario kind '" + kind + "'");
  parse_pair_id(pair);  // canonical names only inside scenario files
  if (!(t_final >= 0.0)) throw ConfigError("time.t_final must be non-negative");
  if (is_1d()) {
    if (mesh.nx < 4) throw ConfigError("mesh.nx must be at least 4 for 1D runs");
    if (!(mesh.length_x > 0.0)) throw ConfigError("mesh.length_x must be positive");
    if (reaction_rates.empty()) throw ConfigError("physics.reaction_rate is required for 1D runs");
    if (fixed_dt <= 0.0 && advection_speed == 0.0)
      throw ConfigError("zero advection speed needs a fixed time.dt (the CFL step is undefined)");
    if (ic.profile != "constant" && ic.profile != "bell" && ic.profile != "alternating")
      throw ConfigError("ic.profile must be constant, bell or alternating");
    return;
  }
  if (mesh.nx < 2 || mesh.ny < 2) throw ConfigError("mesh.nx and mesh.ny must be at least 2");
  if (!(mesh.length_x > 0.0) || !(mesh.length_y > 0.0)) throw ConfigError("mesh lengths must be positive");
  if (ic.topography != "flat" && ic.topography != "bump") throw ConfigError("ic.topography must be flat or bump");
  if (kind == "vent") {
    if (!nu_r_given) throw ConfigError("physics.nu_r is required for vent scenarios (no default is assumed)");
    if (vents.empty()) throw ConfigError("vent scenario needs at least one [vent.N] section");
  }
  for (const auto& v : vents)
    if (!(v.sigma > 0.0)) throw ConfigError("vent sigma must be positive");
  physics.validate();
  time.validate();
}

std::vector<std::string> builtin_names() {
  return {"reaction", "advreact", "advreact-alternating", "vortex", "lake-at-rest", "vent-constant", "vent-chaotic"};
}

ScenarioConfig build(const std::string& name) {
  ScenarioConfig c;
  c.name = name;
  c.pair = "MAX_NU";
  if (name == "reaction") {
    c.kind = "reaction";
    c.mesh.nx = 300;
    c.mesh.length_x = 1.0;
    c.reaction_rates = {3.0, 10.0, 100.0, 1000.0};
    c.fixed_dt = 0.01;
    c.time.courant = 1.1;
    c.t_final = 1.0;
    c.ic.profile = "constant";
  } else if (name == "advreact" || name == "advreact-alternating") {
    c.kind = name;
    c.mesh.length_x = 500.0;
    c.advection_speed = 1.0;
    c.time.courant = 1.22;
    c.t_final = 100.0;
    if (name == "advreact") {
      c.mesh.nx = 100;
      c.mesh.refinements = {100, 200, 300, 400, 500};
      c.reaction_rates = {0.05};
      c.ic.profile = "bell";
    } else {
      c.mesh.nx = 300;
      c.reaction_rates = {1000.0};
      c.ic.profile = "alternating";
    }
  } else if (name == "vortex") {
    c.kind = "vortex";
    c.mesh = {128, 64, 0.0, 0.0, 2.0, 1.0, Boundary::Periodic, Boundary::Periodic, {64, 128, 256}};
    c.time.courant = 1.1;
    c.t_final = 1.0 / 6.0;
  } else if (name == "lake-at-rest") {
    c.kind = "lake-at-rest";
    c.mesh = {200, 200, 0.0, 0.0, 10.0, 10.0, Boundary::Wall, Boundary::Wall, {}};
    c.time.courant = 1.1;
    c.t_final = 1.0;
    c.ic.zeta = 10.0;
    c.ic.hT = 1000.0;
    c.ic.topography = "bump";
  } else if (name == "vent-constant" || name == "vent-chaotic") {
    c.kind = "vent";
    c.mesh = {200, 200, 0.0, 0.0, 200.0, 200.0, Boundary::Wall, Boundary::Wall, {}};
    c.physics.b_coeff = 1e-2;
    c.physics.T_r = 2000.0;
    c.physics.nu_r = 1.0;
    c.nu_r_given = true;
    c.time.courant = 1.1;
    c.time.dt_init = 1e-4;
    c.time.dt_max = 1e-2;
    c.t_final = 90.0;
    VentSpec v;
    v.x = 100.0;
    v.y = 100.0;
    v.sigma = 0.1;
    v.T_e = 2000.0;
    v.discharge.q0 = 200.0;
    v.discharge.kind = name == "vent-constant" ? DischargeSpec::Kind::Constant : DischargeSpec::Kind::Chaotic;
    c.vents.push_back(v);
  } else {
    std::string known;
    for (const auto& n : builtin_names()) known += " " + n;
    throw ConfigError("unknown scenario '" + name + "' (built-ins:" + known + ")");
  }
  return c;
}

ScenarioConfig parse_config(std::istream& in) {
  ScenarioConfig cfg;
  cfg.reaction_rates.clear();
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      static const std::vector<std::string> sections = {"mesh", "physics", "time", "ic", "output"};
      if (section.rfind("vent.", 0) != 0 && std::find(sections.begin(), sections.end(), section) == sections.end())
        throw ConfigError("line " + std::to_string(line_no) + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      assign(cfg, section, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
  return parse_config(in);
}

void write_config(std::ostream& out, const ScenarioConfig& cfg) {
  std::string current = "\x01";
  for (const auto& k : keys()) {
    if (!k.written(cfg)) continue;
    if (k.section != current) {
      if (!k.section.empty()) out << "\n[" << k.section << "]\n";
      current = k.section;
    }
    out << k.name << " = " << k.get(cfg) << '\n';
  }
  for (std::size_t i = 0; i < cfg.vents.size(); ++i) {
    out << "\n[vent." << i << "]\n";
    for (const char* key : kVentKeys) out << key << " = " << get_vent_key(cfg.vents[i], key) << '\n';
  }
}

std::string config_to_string(const ScenarioConfig& cfg) {
  std::ostringstream os;
  write_config(os, cfg);
  return os.str();
}

void apply_override(ScenarioConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' must look like section.key=value");
  const std::string lhs = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  const auto dot = lhs.rfind('.');
  if (dot == std::string::npos) {
    assign(cfg, "", lhs, value);
  } else {
    assign(cfg, lhs.substr(0, dot), lhs.substr(dot + 1), value);
  }
}

double wb_topography(double x, double y) {
  if (x < 3.0 || x > 7.0 || y < 3.0 || y > 7.0) return 0.0;
  return 5.0 * std::exp(-0.4 * (x - 5.0) * (x - 5.0) - 0.4 * (y - 5.0) * (y - 5.0));
}

double vortex_H1(double x) {
  const double c = std::cos(x), s = std::sin(x);
  return x * c * s / 4.0 * (c * c + 1.5) + c * c * (3.0 + c * c) / 16.0 + 3.0 / 16.0 * x * x;
}

double vortex_gamma(const InitialSpec& ic, double gravity) {
  const double dH = vortex_H1(std::numbers::pi / 2.0) - vortex_H1(0.0);
  return std::numbers::pi / (4.0 * ic.r0) * std::sqrt(gravity * (ic.h0 - ic.vortex_depth_min) / dH);
}

VortexState vortex_initial_state(double x, double y, const InitialSpec& ic, double gravity) {
  const double dxr = x - ic.x_c, dyr = y - ic.y_c;
  const double r = std::hypot(dxr, dyr);
  if (r >= ic.r0) return {ic.h0, ic.u_inf, 0.0};
  const double gamma = vortex_gamma(ic, gravity);
  const double rho = std::numbers::pi * r / ic.r0;
  const double k = 2.0 * gamma * ic.r0 / std::numbers::pi;
  const double h = ic.h0 - 4.0 / gravity * k * k * (vortex_H1(std::numbers::pi / 2.0) - vortex_H1(rho / 2.0));
  const double c = std::cos(rho / 2.0);
  const double omega = 2.0 * gamma * c * c;
  return {h, ic.u_inf - dyr * omega, dxr * omega};
}

VortexState vortex_exact_state(double x, double y, double t, const InitialSpec& ic, double gravity, double x_min,
                               double length) {
  double xs = x - ic.u_inf * t;
  if (length > 0.0) {
    xs = x_min + std::fmod(xs - x_min, length);
    if (xs < x_min) xs += length;
    // Evaluate at the periodic image nearest the vortex centre.
    if (xs - ic.x_c > 0.5 * length) xs -= length;
    if (ic.x_c - xs > 0.5 * length) xs += length;
  }
  return vortex_initial_state(xs, y, ic, gravity);
}

Mesh2D make_mesh(const ScenarioConfig& cfg) {
  const auto& m = cfg.mesh;
  return Mesh2D(m.nx, m.ny, m.length_x / m.nx, m.length_y / m.ny, m.x_min, m.y_min, m.boundary_x, m.boundary_y);
}

Field initial_field(const ScenarioConfig& cfg, const Mesh2D& mesh) {
  Field f = Field::zeros(mesh, Layout::Node);
  const double g = cfg.physics.gravity;
  for (int n = 0; n < mesh.node_count(); ++n) {
    const double x = mesh.node_x(n), y = mesh.node_y(n);
    f.z[n] = cfg.ic.topography == "bump" ? wb_topography(x, y) : 0.0;
    auto& s = f.q[n];
    if (cfg.kind == "lake-at-rest") {
      s.h = std::max(cfg.ic.zeta - f.z[n], 0.0);
      s.hT = s.h > 0.0 ? cfg.ic.hT : 0.0;
    } else if (cfg.kind == "vortex") {
      const auto v = vortex_initial_state(x, y, cfg.ic, g);
      s = {v.h, v.h * v.u, v.h * v.v, v.h * cfg.ic.temperature};
    }
  }
  return f;
}

bool reference_field(const ScenarioConfig& cfg, const Mesh2D& mesh, double t, Field& out) {
  if (cfg.kind == "lake-at-rest") {
    out = initial_field(cfg, mesh);
    return true;
  }
  if (cfg.kind == "vortex") {
    out = Field::zeros(mesh, Layout::Node);
    const double period = mesh.boundary_x() == Boundary::Periodic ? cfg.mesh.length_x : 0.0;
    for (int n = 0; n < mesh.node_count(); ++n) {
      const auto v = vortex_exact_state(mesh.node_x(n), mesh.node_y(n), t, cfg.ic, cfg.physics.gravity,
                                        cfg.mesh.x_min, period);
      out.q[n] = {v.h, v.h * v.u, v.h * v.v, v.h * cfg.ic.temperature};
    }
    return true;
  }
  return false;
}

LinearProblem linear_problem(const ScenarioConfig& cfg, double reaction_rate) {
  LinearProblem p;
  p.advection_speed = cfg.advection_speed;
  p.reaction_rate = reaction_rate;
  const double L = cfg.mesh.length_x;
  if (cfg.ic.profile == "bell") {
    p.initial_profile = [L](double x) {
      const double s = (x - L / 2.0) / (0.1 * L);
      return 1.0 + 3.0 * std::exp(-5.0 * s * s);
    };
  } else if (cfg.ic.profile == "alternating") {
    p.initial_profile = [L](double x) {
      const double s = (x - L / 2.0) / (0.05 * L * std::sqrt(2.0));
      return std::exp(-s * s);
    };
    p.alternating = true;
  } else {
    const double q0 = cfg.ic.q0;
    p.initial_profile = [q0](double) { return q0; };
  }
  return p;
}

ErrorNorms field_errors(const ScenarioConfig& cfg, const Mesh2D& mesh, const Field& numeric, const Field& reference) {
  ErrorNorms e;
  for (int n = 0; n < mesh.node_count(); ++n) {
    const State d = numeric.q[n] - reference.q[n];
    e.linf[0] = std::max(e.linf[0], std::abs(d.h));
    e.linf[1] = std::max(e.linf[1], std::abs(d.hu));
    e.linf[2] = std::max(e.linf[2], std::abs(d.hv));
    e.linf[3] = std::max(e.linf[3], std::abs(d.hT));
  }
  // Centerline: the node row whose y is closest to the vortex centre line.
  const int row = static_cast<int>(std::lround((cfg.ic.y_c - mesh.y0()) / mesh.dy()));
  if (row >= 0 && row < mesh.nodes_y()) {
    double acc = 0.0;
    for (int i = 0; i < mesh.nodes_x(); ++i) {
      const int n = mesh.node_index(i, row);
      const double d = numeric.q[n].h - reference.q[n].h;
      acc += d * d * mesh.dx();
      e.centerline_linf = std::max(e.centerline_linf, std::abs(d));
    }
    e.centerline_l2 = std::sqrt(acc);
  }
  return e;
}

Run2DResult run_2d(const ScenarioConfig& cfg, const std::function<void(const SolverState&)>& on_step) {
  cfg.validate();
  if (cfg.is_1d()) throw ConfigError("scenario '" + cfg.name + "' is one-dimensional; use run1d");
  const auto start = std::chrono::steady_clock::now();
  Mesh2D mesh = make_mesh(cfg);
  PhysicsParams physics = cfg.physics;
  if (!cfg.nu_r_given) physics.nu_r = 0.0;
  Solver2D solver(mesh, canonical_pair(parse_pair_id(cfg.pair)), physics, cfg.vents);
  Run2DResult r{mesh, {}, {}, false, {}, 0.0};
  r.state.nodes = initial_field(cfg, mesh);
  r.state.cells = Field::zeros(mesh, Layout::Cell);
  try {
    solver.advance(r.state, cfg.time, cfg.t_final, r.log, on_step);
  } catch (const NumericalFailure&) {
    // status and message already recorded in the log
  }
  Field ref;
  if (reference_field(cfg, mesh, r.state.time, ref)) {
    r.has_reference = true;
    r.errors = field_errors(cfg, mesh, r.state.nodes, ref);
  }
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

double fitted_order(const std::vector<double>& spacing, const std::vector<double>& errors) {
  const std::size_t n = std::min(spacing.size(), errors.size());
  if (n < 2) return 0.0;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(spacing[i]);
    my += std::log(errors[i]);
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(spacing[i]) - mx;
    sxy += dx * (std::log(errors[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

ConvergenceReport converge(const ScenarioConfig& base, const std::vector<int>& sizes) {
  ConvergenceReport rep;
  rep.scenario = base.name;
  rep.pair = base.pair;
  if (base.kind != "advreact" && base.kind != "vortex" && base.kind != "reaction")
    throw ConfigError("no exact solution for a convergence study of '" + base.kind + "'");
  std::vector<double> ok_h, ok_l2, ok_linf;
  for (int n : sizes) {
    ScenarioConfig cfg = base;
    const auto start = std::chrono::steady_clock::now();
    double l2 = 0.0, linf = 0.0;
    std::string status = "completed";
    double spacing = 0.0;
    if (cfg.is_1d()) {
      cfg.mesh.nx = n;
      cfg.validate();
      const auto prob = linear_problem(cfg, cfg.reaction_rates.front());
      RunOptions opts;
      opts.t_final = cfg.t_final;
      if (cfg.fixed_dt > 0.0) opts.fixed_dt = cfg.fixed_dt;
      else opts.courant = cfg.time.courant;
      const auto ts = run(prob, n, cfg.mesh.length_x, canonical_pair(parse_pair_id(cfg.pair)), opts);
      l2 = ts.final_l2();
      linf = ts.final_linf();
      spacing = cfg.mesh.length_x / n;
    } else {
      cfg.mesh.nx = n;
      cfg.mesh.ny = std::max(2, static_cast<int>(std::lround(n * cfg.mesh.length_y / cfg.mesh.length_x)));
      const auto r = run_2d(cfg);
      status = r.log.status;
      l2 = r.errors.centerline_l2;
      linf = r.errors.centerline_linf;
      spacing = cfg.mesh.length_x / n;
    }
    rep.sizes.push_back(n);
    rep.spacing.push_back(spacing);
    rep.l2.push_back(l2);
    rep.linf.push_back(linf);
    rep.status.push_back(status);
    rep.seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    if (status == "completed") {
      ok_h.push_back(spacing);
      ok_l2.push_back(l2);
      ok_linf.push_back(linf);
    } else {
      rep.partial = true;
    }
  }
  if (ok_h.size() >= 2) {
    rep.order_defined = true;
    rep.order_l2 = fitted_order(ok_h, ok_l2);
    rep.order_linf = fitted_order(ok_h, ok_linf);
  }
  return rep;
}

void write_convergence_csv(std::ostream& out, const ConvergenceReport& r) {
  const auto old = out.precision(17);
  out << "cells,spacing,l2,linf,seconds,status\n";
  for (std::size_t i = 0; i < r.sizes.size(); ++i)
    out << r.sizes[i] << ',' << r.spacing[i] << ',' << r.l2[i] << ',' << r.linf[i] << ',' << r.seconds[i] << ','
        << r.status[i] << '\n';
  out.precision(old);
}

void write_convergence_table(std::ostream& out, const ConvergenceReport& r) {
  char buf[160];
  out << "scenario " << r.scenario << ", pair " << r.pair << '\n';
  out << "   cells        spacing             L2           Linf  order(L2)  status\n";
  for (std::size_t i = 0; i < r.sizes.size(); ++i) {
    std::string ord = "       -";
    if (i > 0 && r.l2[i] > 0.0 && r.l2[i - 1] > 0.0) {
      std::snprintf(buf, sizeof buf, "%9.4f", std::log(r.l2[i - 1] / r.l2[i]) / std::log(r.spacing[i - 1] / r.spacing[i]));
      ord = buf;
    }
    std::snprintf(buf, sizeof buf, "%8d %14.6e %14.6e %14.6e %s  %s\n", r.sizes[i], r.spacing[i], r.l2[i], r.linf[i],
                  ord.c_str(), r.status[i].c_str());
    out << buf;
  }
  if (r.order_defined) {
    std::snprintf(buf, sizeof buf, "fitted order: L2 %.4f, Linf %.4f%s\n", r.order_l2, r.order_linf,
                  r.partial ? " (partial)" : "");
    out << buf;
  } else {
    out << "fitted order: undefined (fewer than two completed meshes)\n";
  }
}

}  // namespace lavaimex
