#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lavaimex/lava_model.hpp"
#include "lavaimex/mesh2d.hpp"
#include "lavaimex/scheme1d.hpp"
#include "lavaimex/solver2d.hpp"

namespace lavaimex {

struct MeshSpec {
  int nx = 0;
  int ny = 0;
  double x_min = 0.0;
  double y_min = 0.0;
  double length_x = 0.0;
  double length_y = 0.0;
  Boundary boundary_x = Boundary::Wall;
  Boundary boundary_y = Boundary::Wall;
  std::vector<int> refinements;  // nx values for convergence studies
};

struct InitialSpec {
  std::string profile = "constant";  // 1D: constant | bell | alternating
  double q0 = 1.0;
  double zeta = 10.0;           // lake at rest free surface
  double hT = 1000.0;           // lake at rest energy
  std::string topography = "flat";  // flat | bump
  double h0 = 1.0;              // vortex background depth
  double vortex_depth_min = 0.9;
  double u_inf = 6.0;
  double x_c = 0.5;
  double y_c = 0.5;
  double r0 = 0.25;
  double temperature = 300.0;
};

struct OutputSpec {
  std::string dir;          // empty: no files
  int snapshot_every = 0;   // steps between field dumps, 0 = final only
};

struct ScenarioConfig {
  std::string name;
  std::string kind;  // reaction | advreact | advreact-alternating | vortex | lake-at-rest | vent
  std::string pair = "MAX_NU";
  MeshSpec mesh;
  PhysicsParams physics;
  bool nu_r_given = false;
  double advection_speed = 0.0;
  std::vector<double> reaction_rates;
  double t_final = 0.0;
  double fixed_dt = 0.0;  // 1D fixed step; 0 = Courant based
  TimeControl time;
  InitialSpec ic;
  std::vector<VentSpec> vents;
  OutputSpec output;

  bool is_1d() const { return kind == "reaction" || kind == "advreact" || kind == "advreact-alternating"; }
  /// Throws ConfigError for inconsistent settings.
  void validate() const;
};

std::vector<std::string> builtin_names();
ScenarioConfig build(const std::string& name);

/// Line-oriented `key = value` format with [mesh] [physics] [time] [ic]
/// [vent.N] [output] sections. Unknown keys are errors.
ScenarioConfig parse_config(std::istream& in);
ScenarioConfig load_config(const std::string& path);
void write_config(std::ostream& out, const ScenarioConfig& cfg);
std::string config_to_string(const ScenarioConfig& cfg);

/// Applies "section.key=value" (or top-level "key=value") to a config.
void apply_override(ScenarioConfig& cfg, const std::string& assignment);

/// 5 exp(-0.4 (x-5)^2 - 0.4 (y-5)^2) on [3,7]^2, zero elsewhere.
double wb_topography(double x, double y);

struct VortexState {
  double h;
  double u;
  double v;
};

/// H_1(x) = integral of x cos^4 x.
double vortex_H1(double x);
/// Strength giving h(0) = vortex_depth_min for the momentum-consistent profile.
double vortex_gamma(const InitialSpec& ic, double gravity);
VortexState vortex_initial_state(double x, double y, const InitialSpec& ic, double gravity);
/// Initial state translated by u_inf t, wrapped on a periodic x-interval [x_min, x_min + length).
VortexState vortex_exact_state(double x, double y, double t, const InitialSpec& ic, double gravity, double x_min,
                               double length);

Mesh2D make_mesh(const ScenarioConfig& cfg);
Field initial_field(const ScenarioConfig& cfg, const Mesh2D& mesh);
/// Exact solution at time t where one exists (lake at rest, vortex).
bool reference_field(const ScenarioConfig& cfg, const Mesh2D& mesh, double t, Field& out);

LinearProblem linear_problem(const ScenarioConfig& cfg, double reaction_rate);

struct ErrorNorms {
  std::array<double, 4> linf{};  // h, hu, hv, hT
  double centerline_l2 = 0.0;    // h along y = ic.y_c (vortex)
  double centerline_linf = 0.0;
};

ErrorNorms field_errors(const ScenarioConfig& cfg, const Mesh2D& mesh, const Field& numeric, const Field& reference);

struct Run2DResult {
  Mesh2D mesh;
  SolverState state;
  RunLog log;
  bool has_reference = false;
  ErrorNorms errors;
  double wall_seconds = 0.0;
};

/// Runs a 2D scenario to t_final. Stiffness collapse and numerical failure are
/// reported through log.status instead of exceptions.
Run2DResult run_2d(const ScenarioConfig& cfg, const std::function<void(const SolverState&)>& on_step = {});

struct ConvergenceReport {
  std::string scenario;
  std::string pair;
  std::vector<int> sizes;
  std::vector<double> spacing;
  std::vector<double> l2;
  std::vector<double> linf;
  std::vector<double> seconds;
  std::vector<std::string> status;
  double order_l2 = 0.0;
  double order_linf = 0.0;
  bool order_defined = false;
  bool partial = false;
};

/// Least-squares slope of log(err) against log(spacing).
double fitted_order(const std::vector<double>& spacing, const std::vector<double>& errors);

ConvergenceReport converge(const ScenarioConfig& cfg, const std::vector<int>& sizes);
void write_convergence_csv(std::ostream& out, const ConvergenceReport& r);
void write_convergence_table(std::ostream& out, const ConvergenceReport& r);

}  // namespace lavaimex
