#include "lavaimex/scheme1d.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lavaimex/errors.hpp"

namespace lavaimex {

Grid1D::Grid1D(int n, double spacing)
    : n_cells(n), dx(spacing), node_values(static_cast<std::size_t>(n)), midpoint_values(static_cast<std::size_t>(n)) {
  if (n < 4) throw ConfigError("1D grid needs at least 4 cells, got " + std::to_string(n));
  if (!(spacing > 0.0)) throw ConfigError("1D grid spacing must be positive");
}

double exact_solution(const LinearProblem& prob, double x, double t, double length) {
  double xi = x - prob.advection_speed * t;
  if (length > 0.0) {
    xi = std::fmod(xi, length);
    if (xi < 0.0) xi += length;
  }
  return prob.initial_profile(xi) * std::exp(-prob.reaction_rate * t);
}

namespace {

double sign_of(int j, bool alternating) { return alternating && (j % 2 != 0) ? -1.0 : 1.0; }

}  // namespace

void initialize(Grid1D& grid, const LinearProblem& prob) {
  for (int j = 0; j < grid.n_cells; ++j)
    grid.node_values[j] = sign_of(j, prob.alternating) * prob.initial_profile(grid.x(j));
  std::fill(grid.midpoint_values.begin(), grid.midpoint_values.end(), 0.0);
}

void step(Grid1D& grid, const LinearProblem& prob, const ButcherPair& pair, double dt) {
  const int n = grid.n_cells;
  const double phi = prob.reaction_rate * dt;
  const double nu = prob.advection_speed * dt / grid.dx;
  const auto& ex = pair.explicit_part;
  const auto& im = pair.implicit_part;
  const double a21 = ex.a[1][0], a31 = ex.a[2][0], a32 = ex.a[2][1];
  const double at21 = im.a[1][0], at31 = im.a[2][0], at32 = im.a[2][1];
  const double d2 = 1.0 + im.a[1][1] * phi;
  const double d3 = 1.0 + im.a[2][2] * phi;

  const auto& q = grid.node_values;
  auto& mid = grid.midpoint_values;
  auto at = [&](const std::vector<double>& v, int j) { return v[static_cast<std::size_t>(grid.wrap(j))]; };

  for (int j = 0; j < n; ++j) {
    const double ql = q[j], qr = at(q, j + 1);
    mid[j] = ((1.0 - at21 * phi) * 0.5 * (ql + qr) - a21 * nu * (qr - ql)) / d2;
  }

  std::vector<double> q3(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const double ml = at(mid, j - 1), mr = mid[j];
    const double central = 0.5 * (at(q, j + 1) - at(q, j - 1));
    q3[j] = (q[j] - at31 * phi * q[j] - at32 * phi * 0.5 * (ml + mr) - a31 * nu * central +
             a32 * nu * (ml - mr)) /
            d3;
  }

  std::vector<double> next(static_cast<std::size_t>(n));
  const bool from_last_stage = last_row_is_b(im) && ex.a[2][2] == 0.0;
  for (int j = 0; j < n; ++j) {
    const double ml = at(mid, j - 1), mr = mid[j];
    const double adv1 = 0.5 * (at(q, j + 1) - at(q, j - 1));
    const double adv2 = -(ml - mr);
    const double adv3 = 0.5 * (at(q3, j + 1) - at(q3, j - 1));
    if (from_last_stage) {
      next[j] = q3[j] - nu * ((ex.b[0] - a31) * adv1 + (ex.b[1] - a32) * adv2 + ex.b[2] * adv3);
    } else {
      next[j] = q[j] - nu * (ex.b[0] * adv1 + ex.b[1] * adv2 + ex.b[2] * adv3) -
                phi * (im.b[0] * q[j] + im.b[1] * 0.5 * (ml + mr) + im.b[2] * q3[j]);
    }
  }
  grid.node_values = std::move(next);
}

TimeSeries run(const LinearProblem& prob, int n_cells, double length, const ButcherPair& pair,
               const RunOptions& opts) {
  if (!prob.initial_profile) throw ConfigError("1D problem has no initial profile");
  if (!(opts.t_final >= 0.0)) throw ConfigError("t_final must be non-negative");
  double dt_nominal = 0.0;
  if (opts.courant > 0.0) {
    if (prob.advection_speed == 0.0)
      throw ConfigError("Courant-based stepping needs a non-zero advection speed; give a fixed dt");
    dt_nominal = opts.courant * (length / n_cells) / std::abs(prob.advection_speed);
  } else {
    if (!(opts.fixed_dt > 0.0)) throw ConfigError("either courant or fixed_dt must be positive");
    dt_nominal = opts.fixed_dt;
  }

  TimeSeries ts;
  ts.final_grid = Grid1D(n_cells, length / n_cells);
  Grid1D& grid = ts.final_grid;
  initialize(grid, prob);

  std::vector<double> exact(static_cast<std::size_t>(n_cells));
  auto sample = [&](double t, double dt) {
    double linf = 0.0, l2 = 0.0;
    for (int j = 0; j < n_cells; ++j) {
      exact[j] = sign_of(j, prob.alternating) * exact_solution(prob, grid.x(j), t, length);
      const double e = std::abs(grid.node_values[j] - exact[j]);
      linf = std::max(linf, e);
      l2 += e * e;
    }
    ts.t.push_back(t);
    ts.dt.push_back(dt);
    ts.linf.push_back(linf);
    ts.l2.push_back(std::sqrt(l2 * grid.dx));
  };

  double t = 0.0;
  sample(t, 0.0);
  // Relative slack so round-off in t does not produce a spurious tiny last step.
  const double eps = 1e-12 * std::max(1.0, opts.t_final);
  while (t < opts.t_final - eps) {
    if (opts.max_steps > 0 && ts.steps >= opts.max_steps) break;
    double dt = dt_nominal;
    if (t + dt > opts.t_final - eps) dt = opts.t_final - t;
    step(grid, prob, pair, dt);
    ++ts.steps;
    t = (t + dt > opts.t_final - eps) ? opts.t_final : t + dt;
    sample(t, dt);
  }
  ts.exact = exact;
  return ts;
}

}  // namespace lavaimex
