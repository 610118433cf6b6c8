#pragma once

#include <functional>
#include <vector>

#include "lavaimex/butcher.hpp"

namespace lavaimex {

/// Periodic uniform 1D grid holding node values q_j and midpoint values
/// q_{j+1/2} (stored at index j).
struct Grid1D {
  int n_cells = 0;
  double dx = 0.0;
  std::vector<double> node_values;
  std::vector<double> midpoint_values;

  Grid1D() = default;
  Grid1D(int n, double spacing);

  double length() const { return n_cells * dx; }
  double x(int j) const { return j * dx; }
  int wrap(int j) const { return ((j % n_cells) + n_cells) % n_cells; }
};

/// dq/dt + a dq/dx = -chi q on a periodic interval.
struct LinearProblem {
  double advection_speed = 0.0;
  double reaction_rate = 0.0;
  std::function<double(double)> initial_profile;
  /// Multiply node j of the initial data (and of the exact solution) by (-1)^j.
  bool alternating = false;
};

/// q0(x - a t) exp(-chi t), with x - a t wrapped into [0, length) when length > 0.
double exact_solution(const LinearProblem& prob, double x, double t, double length = 0.0);

/// Fills node values from the initial profile (including the sign pattern).
void initialize(Grid1D& grid, const LinearProblem& prob);

/// One IMEX step; midpoint_values afterwards hold the stage-2 field.
void step(Grid1D& grid, const LinearProblem& prob, const ButcherPair& pair, double dt);

struct RunOptions {
  double courant = 0.0;   // used when > 0
  double fixed_dt = 0.0;  // used when courant == 0
  double t_final = 0.0;
  int max_steps = 0;      // 0 = unlimited
};

struct TimeSeries {
  std::vector<double> t;
  std::vector<double> dt;
  std::vector<double> linf;
  std::vector<double> l2;
  std::vector<double> exact;  // node values of the exact solution at the final time
  Grid1D final_grid;
  int steps = 0;

  double final_linf() const { return linf.empty() ? 0.0 : linf.back(); }
  double final_l2() const { return l2.empty() ? 0.0 : l2.back(); }
};

/// Advances from the initial profile to t_final. Errors are sampled after
/// every step; entry 0 is the initial state.
TimeSeries run(const LinearProblem& prob, int n_cells, double length, const ButcherPair& pair,
               const RunOptions& opts);

}  // namespace lavaimex
