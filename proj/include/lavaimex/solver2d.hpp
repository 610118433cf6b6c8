#pragma once

#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "lavaimex/butcher.hpp"
#include "lavaimex/lava_model.hpp"
#include "lavaimex/mesh2d.hpp"

namespace lavaimex {

struct TimeControl {
  double courant = 1.1;
  double dt_init = 1e-4;
  double dt_floor = 1e-12;
  double dt_max = std::numeric_limits<double>::infinity();
  int max_steps = 0;  // 0 = unlimited

  /// Throws ConfigError when a value is out of range or courant exceeds the
  /// theoretical bound; returns true when courant is above the recommended 1.1.
  bool validate() const;
};

struct SolverState {
  Field nodes;  // q^n and Z on the Q1 layout
  Field cells;  // last stage-2 field on the Q0 layout
  double time = 0.0;
  double dt = 0.0;
  int step_count = 0;
};

struct LogRow {
  int step = 0;
  double t = 0.0;
  double dt = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double max_speed = 0.0;
  double inflow = 0.0;   // cumulative vent volume
  double clipped = 0.0;  // cumulative volume added by clipping negative depths
};

struct RunLog {
  std::vector<LogRow> rows;
  std::string status = "running";  // completed | step_limit | stiffness_collapse | numerical_failure
  std::string message;
  double collapse_dt = 0.0;  // the rejected step when status is stiffness_collapse

  /// Smallest step taken, including a rejected collapse step.
  double min_dt() const;
  /// |mass - mass0 - inflow - clipped| / max(mass0 + inflow, tiny) at the last row.
  double mass_balance_error() const;
};

void write_log_csv(std::ostream& out, const RunLog& log);

class Solver2D {
 public:
  Solver2D(Mesh2D mesh, ButcherPair pair, PhysicsParams physics, std::vector<VentSpec> vents = {});

  const Mesh2D& mesh() const { return mesh_; }
  const ButcherPair& pair() const { return pair_; }
  const PhysicsParams& physics() const { return physics_; }

  /// CFL step from the directional maximum wave speed over wet nodes;
  /// dt_init when nothing is wet. Throws StiffnessCollapse below dt_floor.
  double compute_dt(const SolverState& state, const TimeControl& tc) const;

  Field stage2(const SolverState& state, double dt) const;
  Field stage3(const SolverState& state, const Field& stage2_field, double dt) const;
  /// Final update plus the wet/dry post-processing. `clipped` receives the
  /// volume added by clipping negative depths.
  Field final_update(const SolverState& state, const Field& stage2_field, const Field& stage3_field, double dt,
                     double* clipped = nullptr) const;

  /// One full step of size dt. Returns the vent volume injected.
  double step(SolverState& state, double dt, double* clipped = nullptr) const;

  /// Steps until t_stop. Rows are appended to `log` as they are produced; on
  /// StiffnessCollapse or NumericalFailure the log is finalized and the error rethrown.
  void advance(SolverState& state, const TimeControl& tc, double t_stop, RunLog& log,
               const std::function<void(const SolverState&)>& on_step = {}) const;

  double total_mass(const Field& nodes) const;
  double total_energy(const Field& nodes) const;
  double max_speed(const Field& nodes) const;

  /// Spatial operators exposed for tests: rates per unit area.
  std::vector<State> cell_operator(const Field& nodes) const;
  std::vector<State> node_operator_from_cells(const Field& cells) const;
  std::vector<State> node_operator_from_nodes(const Field& nodes) const;

  /// Vent volume rate per unit area at nodes / cells for time t (sum over vents).
  double vent_total_weight(std::size_t vent) const { return vent_total_[vent]; }

 private:
  State friction_source(const State& s) const;
  void implicit_friction(State& s, double dt_gamma) const;
  void check_finite(const Field& f, const char* where) const;

  Mesh2D mesh_;
  ButcherPair pair_;
  PhysicsParams physics_;
  std::vector<VentSpec> vents_;
  std::vector<std::vector<double>> vent_cells_;
  std::vector<std::vector<double>> vent_nodes_;
  std::vector<double> vent_total_;
};

}  // namespace lavaimex
