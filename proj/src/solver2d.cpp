#include "lavaimex/solver2d.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "lavaimex/errors.hpp"
#include "lavaimex/pc_wb.hpp"
#include "lavaimex/vn_lab.hpp"

namespace lavaimex {

bool TimeControl::validate() const {
  if (!(courant > 0.0)) throw ConfigError("time.courant must be positive");
  if (courant > optimal_courant_bound())
    throw ConfigError("time.courant exceeds the theoretical bound of the scheme (about 1.2202)");
  if (!(dt_init > 0.0)) throw ConfigError("time.dt_init must be positive");
  if (!(dt_floor > 0.0)) throw ConfigError("time.dt_floor must be positive");
  if (!(dt_max > 0.0)) throw ConfigError("time.dt_max must be positive");
  if (max_steps < 0) throw ConfigError("time.max_steps must be non-negative");
  return courant > 1.1;
}

double RunLog::min_dt() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& r : rows)
    if (r.step > 0) m = std::min(m, r.dt);
  if (collapse_dt > 0.0) m = std::min(m, collapse_dt);
  return m;
}

double RunLog::mass_balance_error() const {
  if (rows.empty()) return 0.0;
  const auto& first = rows.front();
  const auto& last = rows.back();
  const double expected = first.mass + (last.inflow - first.inflow) + (last.clipped - first.clipped);
  const double scale = std::max(std::abs(first.mass) + std::abs(last.inflow - first.inflow), 1e-300);
  return std::abs(last.mass - expected) / scale;
}

void write_log_csv(std::ostream& out, const RunLog& log) {
  const auto old = out.precision(17);
  out << "step,t,dt,mass,energy,max_speed,inflow,clipped\n";
  for (const auto& r : log.rows)
    out << r.step << ',' << r.t << ',' << r.dt << ',' << r.mass << ',' << r.energy << ',' << r.max_speed << ','
        << r.inflow << ',' << r.clipped << '\n';
  out.precision(old);
}

Solver2D::Solver2D(Mesh2D mesh, ButcherPair pair, PhysicsParams physics, std::vector<VentSpec> vents)
    : mesh_(std::move(mesh)), pair_(std::move(pair)), physics_(physics), vents_(std::move(vents)) {
  physics_.validate();
  if (!analyze_pair(pair_).structure_ok)
    throw ConfigError("solver needs an explicit/ESDIRK pair (strictly lower explicit part, constant diagonal)");
  for (const auto& v : vents_) {
    vent_cells_.push_back(vent_cell_weights(v, mesh_));
    vent_nodes_.push_back(vent_node_weights(v, mesh_));
    double total = 0.0;
    const auto& w = vent_nodes_.back();
    for (int n = 0; n < mesh_.node_count(); ++n) total += w[n] * mesh_.lumped_mass(n);
    vent_total_.push_back(total);
  }
}

State Solver2D::friction_source(const State& s) const {
  if (!is_wet(s, physics_.h_min)) return {};
  const double lambda = friction_lambda(s.h, s.hT / s.h, physics_);
  return {0.0, -lambda * s.hu, -lambda * s.hv, 0.0};
}

void Solver2D::implicit_friction(State& s, double dt_gamma) const {
  if (!is_wet(s, physics_.h_min)) {
    s.hu = s.hv = s.hT = 0.0;
    return;
  }
  const double lambda = friction_lambda(s.h, s.hT / s.h, physics_);
  const double denom = 1.0 + dt_gamma * lambda;
  s.hu /= denom;
  s.hv /= denom;
}

namespace {

// Advective flux along a wall normal with the normal-momentum entry removed:
// the difference between the interior flux and the reflective wall flux.
State wall_excess(const FluxTensor& f, double nx, double ny) {
  State s = nx * f.x + ny * f.y;
  if (nx != 0.0) s.hu = 0.0;
  if (ny != 0.0) s.hv = 0.0;
  return s;
}

}  // namespace

std::vector<State> Solver2D::cell_operator(const Field& nodes) const {
  const double dx = mesh_.dx(), dy = mesh_.dy(), area = mesh_.cell_area();
  const double g = physics_.gravity, hmin = physics_.h_min;
  const bool wall_x = mesh_.boundary_x() == Boundary::Wall;
  const bool wall_y = mesh_.boundary_y() == Boundary::Wall;
  std::vector<State> out(static_cast<std::size_t>(mesh_.cell_count()));
  for (int c = 0; c < mesh_.cell_count(); ++c) {
    const auto [i, j] = mesh_.cell_ij(c);
    const auto n = mesh_.nodes_of_cell(c);
    std::array<FluxTensor, 4> f;
    CornerData corners;
    for (int k = 0; k < 4; ++k) {
      f[k] = advective_flux(nodes.q[n[k]], hmin);
      corners.h[k] = nodes.q[n[k]].h;
      corners.z[k] = nodes.z[n[k]];
    }
    const State div = (0.5 / dx) * ((f[1].x - f[0].x) + (f[3].x - f[2].x)) +
                      (0.5 / dy) * ((f[2].y - f[0].y) + (f[3].y - f[1].y));
    State rate = -1.0 * div;
    rate.hu -= wb_surface_gradient_integral(corners, Direction::X, g, dx, dy) / area;
    rate.hv -= wb_surface_gradient_integral(corners, Direction::Y, g, dx, dy) / area;
    auto wall = [&](int a, int b, double nx, double ny, double len) {
      rate += (0.5 * len / area) * (wall_excess(f[a], nx, ny) + wall_excess(f[b], nx, ny));
    };
    if (wall_x && i == 0) wall(0, 2, -1.0, 0.0, dy);
    if (wall_x && i == mesh_.nx() - 1) wall(1, 3, 1.0, 0.0, dy);
    if (wall_y && j == 0) wall(0, 1, 0.0, -1.0, dx);
    if (wall_y && j == mesh_.ny() - 1) wall(2, 3, 0.0, 1.0, dx);
    out[c] = rate;
  }
  return out;
}

std::vector<State> Solver2D::node_operator_from_nodes(const Field& nodes) const {
  return lumped_mass_scatter(mesh_, cell_operator(nodes));
}

std::vector<State> Solver2D::node_operator_from_cells(const Field& cells) const {
  const double dx = mesh_.dx(), dy = mesh_.dy();
  const double g = physics_.gravity, hmin = physics_.h_min;
  const int nx = mesh_.nx(), ny = mesh_.ny();
  const bool per_x = mesh_.boundary_x() == Boundary::Periodic;
  const bool per_y = mesh_.boundary_y() == Boundary::Periodic;
  std::vector<State> acc(static_cast<std::size_t>(mesh_.node_count()));

  std::vector<FluxTensor> f(static_cast<std::size_t>(mesh_.cell_count()));
  for (int c = 0; c < mesh_.cell_count(); ++c) f[c] = advective_flux(cells.q[c], hmin);

  // Interior edge between cells km (minus side) and kp along unit normal (nx_, ny_).
  auto interior = [&](int km, int kp, double nxn, double nyn, double len, int e0, int e1) {
    const State& qm = cells.q[km];
    const State& qp = cells.q[kp];
    State jump = nxn * (f[km].x - f[kp].x) + nyn * (f[km].y - f[kp].y);
    const double hbar = 0.5 * (qm.h + qp.h);
    // Pressure jump plus the two path fluctuations. When both sides are wet
    // the fluctuations add up to g hbar (Z+ - Z-), so the sum is taken on the
    // free surface; a dry side switches the bed term off.
    const bool coupled = qm.h >= hmin && qp.h >= hmin;
    const double dw = coupled ? (qp.h + cells.z[kp]) - (qm.h + cells.z[km]) : qp.h - qm.h;
    const double momentum = g * hbar * dw;
    jump.hu -= momentum * nxn;
    jump.hv -= momentum * nyn;
    const State share = (0.5 * len) * jump;
    acc[e0] += share;
    acc[e1] += share;
  };
  auto wall = [&](int k, double nxn, double nyn, double len, int e0, int e1) {
    const State share = (0.5 * len) * wall_excess(f[k], nxn, nyn);
    acc[e0] += share;
    acc[e1] += share;
  };

  for (int j = 0; j < ny; ++j) {
    for (int i = per_x ? 0 : 1; i < nx; ++i) {
      const int km = mesh_.cell_index((i - 1 + nx) % nx, j), kp = mesh_.cell_index(i, j);
      interior(km, kp, 1.0, 0.0, dy, mesh_.node_index(i, j), mesh_.node_index(i, j + 1));
    }
    if (!per_x) {
      wall(mesh_.cell_index(0, j), -1.0, 0.0, dy, mesh_.node_index(0, j), mesh_.node_index(0, j + 1));
      wall(mesh_.cell_index(nx - 1, j), 1.0, 0.0, dy, mesh_.node_index(nx, j), mesh_.node_index(nx, j + 1));
    }
  }
  for (int i = 0; i < nx; ++i) {
    for (int j = per_y ? 0 : 1; j < ny; ++j) {
      const int km = mesh_.cell_index(i, (j - 1 + ny) % ny), kp = mesh_.cell_index(i, j);
      interior(km, kp, 0.0, 1.0, dx, mesh_.node_index(i, j), mesh_.node_index(i + 1, j));
    }
    if (!per_y) {
      wall(mesh_.cell_index(i, 0), 0.0, -1.0, dx, mesh_.node_index(i, 0), mesh_.node_index(i + 1, 0));
      wall(mesh_.cell_index(i, ny - 1), 0.0, 1.0, dx, mesh_.node_index(i, ny), mesh_.node_index(i + 1, ny));
    }
  }
  for (int n = 0; n < mesh_.node_count(); ++n) acc[n] *= 1.0 / mesh_.lumped_mass(n);
  return acc;
}

double Solver2D::compute_dt(const SolverState& state, const TimeControl& tc) const {
  const auto& q = state.nodes.q;
  double worst = 0.0;
  int where = -1;
  for (int n = 0; n < mesh_.node_count(); ++n) {
    if (!is_wet(q[n], physics_.h_min)) continue;
    const auto p = primitive(q[n], physics_.h_min);
    const double c = std::sqrt(physics_.gravity * q[n].h);
    const double rate = std::max((std::abs(p.u) + c) / mesh_.dx(), (std::abs(p.v) + c) / mesh_.dy());
    if (rate > worst) {
      worst = rate;
      where = n;
    }
  }
  if (where < 0) return std::min(tc.dt_init, tc.dt_max);
  const double dt = tc.courant / worst;
  if (!(dt >= tc.dt_floor)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "time step " << dt << " s fell below the floor " << tc.dt_floor << " s at node (" << mesh_.node_x(where)
        << ", " << mesh_.node_y(where) << ")";
    throw StiffnessCollapse(dt, mesh_.node_x(where), mesh_.node_y(where), msg.str());
  }
  return std::min(dt, tc.dt_max);
}

Field Solver2D::stage2(const SolverState& state, double dt) const {
  const auto& ex = pair_.explicit_part;
  const auto& im = pair_.implicit_part;
  const double t = state.time;
  Field out = node_to_cell_average(mesh_, state.nodes);
  // Cell bed taken as mean(h + Z) - mean(h): the same number as mean(Z), but a
  // flat free surface then averages to itself exactly and stays flat.
  for (int c = 0; c < mesh_.cell_count(); ++c) {
    const auto n = mesh_.nodes_of_cell(c);
    double surface = 0.0;
    for (int k : n) surface += state.nodes.q[k].h + state.nodes.z[k];
    out.z[c] = 0.25 * surface - out.q[c].h;
  }
  const auto rate = cell_operator(state.nodes);
  for (int c = 0; c < mesh_.cell_count(); ++c) {
    State s = out.q[c] + (dt * ex.a[1][0]) * rate[c];
    if (im.a[1][0] != 0.0) s += (dt * im.a[1][0]) * friction_source(out.q[c]);
    out.q[c] = s;
  }
  for (std::size_t v = 0; v < vents_.size(); ++v) {
    const auto& vent = vents_[v];
    const double volume = dt * (im.a[1][0] * vent.discharge(t + im.c[0] * dt) +
                                im.a[1][1] * vent.discharge(t + im.c[1] * dt));
    if (volume == 0.0) continue;
    for (int c = 0; c < mesh_.cell_count(); ++c) {
      const double add = volume * vent_cells_[v][c];
      out.q[c].h += add;
      out.q[c].hT += add * vent.T_e;
    }
  }
  const double dtg = dt * im.a[1][1];
  for (auto& s : out.q) implicit_friction(s, dtg);
  return out;
}

Field Solver2D::stage3(const SolverState& state, const Field& s2, double dt) const {
  const auto& ex = pair_.explicit_part;
  const auto& im = pair_.implicit_part;
  const double t = state.time;
  Field out = state.nodes;
  if (dt == 0.0) return out;
  const auto l1 = node_operator_from_nodes(state.nodes);
  const auto l01 = node_operator_from_cells(s2);
  std::vector<State> s2_src(static_cast<std::size_t>(mesh_.cell_count()));
  for (int c = 0; c < mesh_.cell_count(); ++c) s2_src[c] = friction_source(s2.q[c]);
  const auto s2_nodes = lumped_mass_scatter(mesh_, s2_src);
  for (int n = 0; n < mesh_.node_count(); ++n) {
    State s = state.nodes.q[n] + (dt * ex.a[2][0]) * l1[n] + (dt * ex.a[2][1]) * l01[n] +
              (dt * im.a[2][1]) * s2_nodes[n];
    if (im.a[2][0] != 0.0) s += (dt * im.a[2][0]) * friction_source(state.nodes.q[n]);
    out.q[n] = s;
  }
  for (std::size_t v = 0; v < vents_.size(); ++v) {
    const auto& vent = vents_[v];
    double volume = 0.0;
    for (int l = 0; l < 3; ++l) volume += im.a[2][l] * vent.discharge(t + im.c[l] * dt);
    volume *= dt;
    if (volume == 0.0) continue;
    for (int n = 0; n < mesh_.node_count(); ++n) {
      const double add = volume * vent_nodes_[v][n];
      out.q[n].h += add;
      out.q[n].hT += add * vent.T_e;
    }
  }
  const double dtg = dt * im.a[2][2];
  for (auto& s : out.q) implicit_friction(s, dtg);
  return out;
}

Field Solver2D::final_update(const SolverState& state, const Field& s2, const Field& s3, double dt,
                             double* clipped) const {
  const auto& b = pair_.explicit_part.b;
  const auto& bt = pair_.implicit_part.b;
  const auto& ct = pair_.implicit_part.c;
  const double t = state.time;
  Field out = state.nodes;
  const auto& ex = pair_.explicit_part;

  if (last_row_is_b(pair_.implicit_part) && ex.a[2][2] == 0.0) {
    // Implicit weights equal the third implicit row, so the stiff sources and
    // vent terms of the final update are exactly those already in stage 3.
    const double w1 = b[0] - ex.a[2][0], w2 = b[1] - ex.a[2][1], w3 = b[2];
    const auto l01 = node_operator_from_cells(s2);
    const auto l3 = node_operator_from_nodes(s3);
    std::vector<State> l1;
    if (w1 != 0.0) l1 = node_operator_from_nodes(state.nodes);
    for (int n = 0; n < mesh_.node_count(); ++n) {
      State s = s3.q[n] + (dt * w2) * l01[n] + (dt * w3) * l3[n];
      if (w1 != 0.0) s += (dt * w1) * l1[n];
      out.q[n] = s;
    }
  } else {
    const auto l1 = node_operator_from_nodes(state.nodes);
    const auto l01 = node_operator_from_cells(s2);
    const auto l3 = node_operator_from_nodes(s3);
    std::vector<State> s2_src(static_cast<std::size_t>(mesh_.cell_count()));
    for (int c = 0; c < mesh_.cell_count(); ++c) s2_src[c] = friction_source(s2.q[c]);
    const auto s2_nodes = lumped_mass_scatter(mesh_, s2_src);

    for (int n = 0; n < mesh_.node_count(); ++n) {
      State s = state.nodes.q[n] + (dt * b[0]) * l1[n] + (dt * b[1]) * l01[n] + (dt * b[2]) * l3[n] +
                (dt * bt[1]) * s2_nodes[n] + (dt * bt[2]) * friction_source(s3.q[n]);
      if (bt[0] != 0.0) s += (dt * bt[0]) * friction_source(state.nodes.q[n]);
      out.q[n] = s;
    }
    for (std::size_t v = 0; v < vents_.size(); ++v) {
      const auto& vent = vents_[v];
      double volume = 0.0;
      for (int l = 0; l < 3; ++l) volume += bt[l] * vent.discharge(t + ct[l] * dt);
      volume *= dt;
      if (volume == 0.0) continue;
      for (int n = 0; n < mesh_.node_count(); ++n) {
        const double add = volume * vent_nodes_[v][n];
        out.q[n].h += add;
        out.q[n].hT += add * vent.T_e;
      }
    }
  }

  double added = 0.0;
  for (int n = 0; n < mesh_.node_count(); ++n) {
    auto& s = out.q[n];
    if (s.h < 0.0) {
      added += -s.h * mesh_.lumped_mass(n);
      s.h = 0.0;
    }
    if (s.h < physics_.h_min) s.hu = s.hv = s.hT = 0.0;
  }
  if (clipped) *clipped = added;
  check_finite(out, "final update");
  return out;
}

void Solver2D::check_finite(const Field& f, const char* where) const {
  for (std::size_t k = 0; k < f.size(); ++k) {
    const auto& s = f.q[k];
    if (!std::isfinite(s.h) || !std::isfinite(s.hu) || !std::isfinite(s.hv) || !std::isfinite(s.hT)) {
      const int n = static_cast<int>(k);
      std::ostringstream msg;
      msg << "non-finite value after " << where << " at node (" << mesh_.node_x(n) << ", " << mesh_.node_y(n)
          << ")";
      throw NumericalFailure(msg.str());
    }
  }
}

double Solver2D::step(SolverState& state, double dt, double* clipped) const {
  const Field s2 = stage2(state, dt);
  const Field s3 = stage3(state, s2, dt);
  Field next = final_update(state, s2, s3, dt, clipped);
  const auto& bt = pair_.implicit_part.b;
  const auto& ct = pair_.implicit_part.c;
  double inflow = 0.0;
  for (std::size_t v = 0; v < vents_.size(); ++v) {
    double volume = 0.0;
    for (int l = 0; l < 3; ++l) volume += bt[l] * vents_[v].discharge(state.time + ct[l] * dt);
    inflow += dt * volume * vent_total_[v];
  }
  state.cells = s2;
  state.nodes = std::move(next);
  state.time += dt;
  state.dt = dt;
  ++state.step_count;
  return inflow;
}

double Solver2D::total_mass(const Field& nodes) const {
  double m = 0.0;
  for (int n = 0; n < mesh_.node_count(); ++n) m += nodes.q[n].h * mesh_.lumped_mass(n);
  return m;
}

double Solver2D::total_energy(const Field& nodes) const {
  double e = 0.0;
  for (int n = 0; n < mesh_.node_count(); ++n) e += nodes.q[n].hT * mesh_.lumped_mass(n);
  return e;
}

double Solver2D::max_speed(const Field& nodes) const {
  double m = 0.0;
  for (const auto& s : nodes.q) {
    const auto p = primitive(s, physics_.h_min);
    m = std::max(m, std::hypot(p.u, p.v));
  }
  return m;
}

void Solver2D::advance(SolverState& state, const TimeControl& tc, double t_stop, RunLog& log,
                       const std::function<void(const SolverState&)>& on_step) const {
  tc.validate();
  auto row = [&](double dt, double inflow, double clipped) {
    log.rows.push_back({state.step_count, state.time, dt, total_mass(state.nodes), total_energy(state.nodes),
                        max_speed(state.nodes), inflow, clipped});
  };
  if (log.rows.empty()) row(0.0, 0.0, 0.0);
  double inflow = log.rows.back().inflow;
  double clipped_total = log.rows.back().clipped;
  const double eps = 1e-12 * std::max(1.0, std::abs(t_stop));
  int taken = 0;
  log.status = "running";
  try {
    while (state.time < t_stop - eps) {
      if (tc.max_steps > 0 && taken >= tc.max_steps) {
        log.status = "step_limit";
        return;
      }
      double dt = compute_dt(state, tc);
      if (state.time + dt > t_stop) dt = t_stop - state.time;
      double clipped = 0.0;
      inflow += step(state, dt, &clipped);
      clipped_total += clipped;
      ++taken;
      row(dt, inflow, clipped_total);
      if (on_step) on_step(state);
    }
  } catch (const StiffnessCollapse& e) {
    log.status = "stiffness_collapse";
    log.message = e.what();
    log.collapse_dt = e.dt();
    throw;
  } catch (const NumericalFailure& e) {
    log.status = "numerical_failure";
    log.message = e.what();
    throw;
  }
  log.status = "completed";
}

}  // namespace lavaimex
