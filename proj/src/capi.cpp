#include "lavaimex/lavaimex.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lavaimex/butcher.hpp"
#include "lavaimex/errors.hpp"
#include "lavaimex/scenarios.hpp"
#include "lavaimex/scheme1d.hpp"
#include "lavaimex/vn_lab.hpp"

struct lx_pair {
  lavaimex::ButcherPair pair;
};

struct lx_scenario {
  lavaimex::ScenarioConfig cfg;
};

struct Series1D {
  double chi;
  lavaimex::TimeSeries series;
  double t_final;
  lavaimex::LinearProblem problem;
  double length;
};

struct lx_run {
  std::optional<lavaimex::Run2DResult> two_d;
  std::vector<Series1D> one_d;
  std::string status = "completed";
  std::string message;
  double wall_seconds = 0.0;
};

namespace {

namespace fs = std::filesystem;
using namespace lavaimex;

thread_local std::string g_last_error;

lx_status fail(lx_status code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

template <class F>
lx_status guarded(F&& body) {
  g_last_error.clear();
  try {
    return body();
  } catch (const ConfigError& e) {
    return fail(LX_ERR_CONFIG, e.what());
  } catch (const NumericalFailure& e) {
    return fail(LX_ERR_NUMERICAL, e.what());
  } catch (const SingularMatrixError& e) {
    return fail(LX_ERR_NUMERICAL, e.what());
  } catch (const std::domain_error& e) {
    return fail(LX_ERR_CONFIG, e.what());
  } catch (const std::exception& e) {
    return fail(LX_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(LX_ERR_INTERNAL, "unknown exception");
  }
}

void emit(lx_sink sink, void* user, const std::string& text) {
  if (sink && !text.empty()) sink(text.data(), text.size(), user);
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
}

std::string series_csv(const std::vector<Series1D>& runs) {
  std::ostringstream os;
  os << "chi,step,t,dt,linf,l2\n";
  for (const auto& r : runs)
    for (std::size_t k = 0; k < r.series.t.size(); ++k)
      os << g17(r.chi) << ',' << k << ',' << g17(r.series.t[k]) << ',' << g17(r.series.dt[k]) << ','
         << g17(r.series.linf[k]) << ',' << g17(r.series.l2[k]) << '\n';
  return os.str();
}

std::string profile_csv(const Series1D& r, bool with_chi) {
  std::ostringstream os;
  os << (with_chi ? "chi," : "") << "t,x,q_numeric,q_exact,err\n";
  const auto& g = r.series.final_grid;
  for (int j = 0; j < g.n_cells; ++j) {
    const double q = g.node_values[j], e = r.series.exact[j];
    if (with_chi) os << g17(r.chi) << ',';
    os << g17(r.t_final) << ',' << g17(g.x(j)) << ',' << g17(q) << ',' << g17(e) << ',' << g17(q - e) << '\n';
  }
  return os.str();
}

Series1D run_linear(const ScenarioConfig& cfg, double chi, const ButcherPair& pair) {
  const auto prob = linear_problem(cfg, chi);
  RunOptions opts;
  opts.t_final = cfg.t_final;
  opts.max_steps = cfg.time.max_steps;
  if (cfg.fixed_dt > 0.0) opts.fixed_dt = cfg.fixed_dt;
  else opts.courant = cfg.time.courant;
  auto ts = run(prob, cfg.mesh.nx, cfg.mesh.length_x, pair, opts);
  const double t_end = ts.t.empty() ? 0.0 : ts.t.back();
  return {chi, std::move(ts), t_end, prob, cfg.mesh.length_x};
}

std::string field_text(const Run2DResult& r) {
  std::ostringstream os;
  write_field(os, r.mesh, r.state.nodes);
  return os.str();
}

}  // namespace

extern "C" {

const char* lx_version(void) { return "1.0.0"; }

const char* lx_last_error(void) { return g_last_error.c_str(); }

lx_status lx_pair_create(const char* name_or_path, lx_pair** out) {
  if (!name_or_path || !out) return fail(LX_ERR_USAGE, "lx_pair_create: NULL argument");
  *out = nullptr;
  return guarded([&] {
    const std::string arg = name_or_path;
    bool canonical = true;
    try {
      parse_pair_id(arg);
    } catch (const ConfigError&) {
      canonical = false;
    }
    if (!canonical && !fs::exists(arg))
      return fail(LX_ERR_USAGE, "'" + arg + "' is neither MAX_NU, C_EQ_CTILDE nor a readable tableau file");
    *out = new lx_pair{resolve_pair(arg)};
    return LX_OK;
  });
}

void lx_pair_destroy(lx_pair* pair) { delete pair; }

const char* lx_pair_name(const lx_pair* pair) { return pair ? pair->pair.name.c_str() : ""; }

lx_status lx_pair_write(const lx_pair* pair, lx_sink sink, void* user) {
  if (!pair) return fail(LX_ERR_USAGE, "lx_pair_write: NULL pair");
  return guarded([&] {
    std::ostringstream os;
    write_pair(os, pair->pair);
    emit(sink, user, os.str());
    return LX_OK;
  });
}

lx_status lx_tableau_check(const lx_pair* pair, lx_sink sink, void* user, int* all_pass) {
  if (!pair) return fail(LX_ERR_USAGE, "lx_tableau_check: NULL pair");
  return guarded([&] {
    const auto report = analyze_pair(pair->pair);
    std::ostringstream os;
    write_report(os, pair->pair, report);
    emit(sink, user, os.str());
    if (all_pass) *all_pass = report.all_pass() ? 1 : 0;
    return report.all_pass() ? LX_OK : fail(LX_CHECK_FAILED, "tableau conditions not satisfied");
  });
}

lx_status lx_stability_certify(const lx_pair* pair, lx_sink sink, void* user, int* l_stable) {
  if (!pair) return fail(LX_ERR_USAGE, "lx_stability_certify: NULL pair");
  return guarded([&] {
    const auto report = analyze_pair(pair->pair);
    const auto cert = check_space_time_L_stability(pair->pair);
    std::ostringstream os;
    write_report(os, pair->pair, report);
    write_certificate(os, cert);
    const bool ok = report.all_pass() && cert.space_time_L_stable;
    if (!cert.space_time_L_stable) {
      const char* names[] = {"at21_at32", "at21_at32m2a32_p_2a31g", "at31_g"};
      for (int k = 0; k < 3; ++k)
        if (std::abs(cert.conditions[k]) >= 1e-14) os << "violated = eq_condition." << names[k] << '\n';
    }
    os << "certified = " << (ok ? "yes" : "no") << '\n';
    emit(sink, user, os.str());
    if (l_stable) *l_stable = cert.space_time_L_stable ? 1 : 0;
    return ok ? LX_OK : fail(LX_CHECK_FAILED, "pair is not certified");
  });
}

lx_status lx_stability_sweep(const lx_pair* pair, double courant, int theta_points, lx_sink sink, void* user) {
  if (!pair) return fail(LX_ERR_USAGE, "lx_stability_sweep: NULL pair");
  if (theta_points < 1) return fail(LX_ERR_USAGE, "theta_points must be positive");
  return guarded([&] {
    std::ostringstream os;
    write_sweep_csv(os, stability_sweep(pair->pair, courant, theta_points));
    emit(sink, user, os.str());
    return LX_OK;
  });
}

lx_status lx_amplification(const lx_pair* pair, double courant, double phi, double theta, double* re, double* im) {
  if (!pair || !re || !im) return fail(LX_ERR_USAGE, "lx_amplification: NULL argument");
  return guarded([&] {
    const auto g = full_factor(pair->pair, {courant, phi, theta});
    *re = g.real();
    *im = g.imag();
    return LX_OK;
  });
}

lx_status lx_courant_bound(double a32, double* out) {
  if (!out) return fail(LX_ERR_USAGE, "lx_courant_bound: NULL output");
  return guarded([&] {
    *out = courant_bound(a32);
    return LX_OK;
  });
}

double lx_optimal_a32(void) { return optimal_a32(); }

double lx_optimal_courant_bound(void) { return optimal_courant_bound(); }

void lx_run1d_defaults(lx_run1d_options* opts) {
  if (!opts) return;
  *opts = {"advreact", 0, 0.0, -1.0, -1.0};
}

lx_status lx_run1d(const lx_run1d_options* opts, const lx_pair* pair, lx_sink csv, void* user, double* linf,
                   double* l2) {
  if (!opts || !opts->case_name) return fail(LX_ERR_USAGE, "lx_run1d: NULL options");
  return guarded([&] {
    const std::string name = opts->case_name;
    ScenarioConfig cfg;
    if (name == "reaction" || name == "advreact") cfg = build(name);
    else if (name == "alternating") cfg = build("advreact-alternating");
    else return fail(LX_ERR_USAGE, "unknown 1D case '" + name + "' (reaction, advreact, alternating)");
    if (opts->cells > 0) cfg.mesh.nx = opts->cells;
    if (opts->courant > 0.0) cfg.time.courant = opts->courant;
    if (opts->t_final >= 0.0) cfg.t_final = opts->t_final;
    const double chi = opts->reaction_rate >= 0.0 ? opts->reaction_rate : cfg.reaction_rates.front();
    cfg.reaction_rates = {chi};
    cfg.validate();
    const Series1D r = run_linear(cfg, chi, pair ? pair->pair : canonical_pair(parse_pair_id(cfg.pair)));
    emit(csv, user, profile_csv(r, false));
    if (linf) *linf = r.series.final_linf();
    if (l2) *l2 = r.series.final_l2();
    return LX_OK;
  });
}

lx_status lx_scenario_builtin(const char* name, lx_scenario** out) {
  if (!name || !out) return fail(LX_ERR_USAGE, "lx_scenario_builtin: NULL argument");
  *out = nullptr;
  return guarded([&] {
    *out = new lx_scenario{build(name)};
    return LX_OK;
  });
}

lx_status lx_scenario_load(const char* path, lx_scenario** out) {
  if (!path || !out) return fail(LX_ERR_USAGE, "lx_scenario_load: NULL argument");
  *out = nullptr;
  if (!fs::is_regular_file(path)) return fail(LX_ERR_USAGE, std::string("no such scenario file '") + path + "'");
  return guarded([&] {
    *out = new lx_scenario{load_config(path)};
    return LX_OK;
  });
}

void lx_scenario_destroy(lx_scenario* scenario) { delete scenario; }

lx_status lx_scenario_set(lx_scenario* scenario, const char* assignment) {
  if (!scenario || !assignment) return fail(LX_ERR_USAGE, "lx_scenario_set: NULL argument");
  return guarded([&] {
    apply_override(scenario->cfg, assignment);
    return LX_OK;
  });
}

lx_status lx_scenario_write(const lx_scenario* scenario, lx_sink sink, void* user) {
  if (!scenario) return fail(LX_ERR_USAGE, "lx_scenario_write: NULL scenario");
  return guarded([&] {
    emit(sink, user, config_to_string(scenario->cfg));
    return LX_OK;
  });
}

lx_status lx_scenario_save(const lx_scenario* scenario, const char* path) {
  if (!scenario || !path) return fail(LX_ERR_USAGE, "lx_scenario_save: NULL argument");
  return guarded([&] {
    write_text(path, config_to_string(scenario->cfg));
    return LX_OK;
  });
}

int lx_scenario_is_1d(const lx_scenario* scenario) { return scenario && scenario->cfg.is_1d() ? 1 : 0; }

size_t lx_builtin_count(void) { return builtin_names().size(); }

const char* lx_builtin_name(size_t index) {
  static const std::vector<std::string> names = builtin_names();
  return index < names.size() ? names[index].c_str() : nullptr;
}

lx_status lx_scenario_run(const lx_scenario* scenario, const char* output_dir, lx_run** out) {
  if (!scenario || !out) return fail(LX_ERR_USAGE, "lx_scenario_run: NULL argument");
  *out = nullptr;
  return guarded([&] {
    const auto& cfg = scenario->cfg;
    cfg.validate();
    const std::string dir_name = output_dir ? output_dir : cfg.output.dir;
    const fs::path dir(dir_name);
    if (!dir_name.empty()) {
      std::error_code ec;
      fs::create_directories(dir, ec);
      if (ec) return fail(LX_ERR_USAGE, "cannot create output directory '" + dir_name + "': " + ec.message());
      write_text(dir / "scenario.cfg", config_to_string(cfg));
    }
    auto run = std::make_unique<lx_run>();
    if (cfg.is_1d()) {
      const auto pair = canonical_pair(parse_pair_id(cfg.pair));
      for (double chi : cfg.reaction_rates) run->one_d.push_back(run_linear(cfg, chi, pair));
      if (!dir_name.empty()) {
        write_text(dir / "log.csv", series_csv(run->one_d));
        std::string profiles;
        for (std::size_t k = 0; k < run->one_d.size(); ++k) {
          const auto text = profile_csv(run->one_d[k], true);
          profiles += k == 0 ? text : text.substr(text.find('\n') + 1);
        }
        write_text(dir / "final.csv", profiles);
      }
      *out = run.release();
      return LX_OK;
    }
    int snapshot = 0;
    std::function<void(const SolverState&)> on_step;
    const Mesh2D mesh = make_mesh(cfg);
    if (!dir_name.empty() && cfg.output.snapshot_every > 0) {
      on_step = [&](const SolverState& s) {
        if (s.step_count % cfg.output.snapshot_every != 0) return;
        char name[64];
        std::snprintf(name, sizeof name, "snapshot_%06d.txt", ++snapshot);
        std::ostringstream os;
        write_field(os, mesh, s.nodes);
        write_text(dir / name, os.str());
      };
    }
    run->two_d = run_2d(cfg, on_step);
    const auto& r = *run->two_d;
    run->status = r.log.status;
    run->message = r.log.message;
    run->wall_seconds = r.wall_seconds;
    if (!dir_name.empty()) {
      std::ostringstream log;
      write_log_csv(log, r.log);
      write_text(dir / "log.csv", log.str());
      write_text(dir / "final.txt", field_text(r));
    }
    const bool failed = r.log.status == "stiffness_collapse" || r.log.status == "numerical_failure";
    *out = run.release();
    return failed ? fail(LX_ERR_NUMERICAL, (*out)->message) : LX_OK;
  });
}

void lx_run_destroy(lx_run* run) { delete run; }

lx_status lx_run_info_get(const lx_run* run, lx_run_info* info) {
  if (!run || !info) return fail(LX_ERR_USAGE, "lx_run_info_get: NULL argument");
  *info = lx_run_info{};
  info->status = run->status.c_str();
  info->message = run->message.c_str();
  if (run->two_d) {
    const auto& r = *run->two_d;
    info->steps = r.state.step_count;
    info->time = r.state.time;
    info->min_dt = r.log.min_dt();
    info->mass_balance_error = r.log.mass_balance_error();
    info->has_reference = r.has_reference ? 1 : 0;
    for (int k = 0; k < 4; ++k) info->linf[k] = r.errors.linf[k];
    info->centerline_l2 = r.errors.centerline_l2;
    info->centerline_linf = r.errors.centerline_linf;
    info->wall_seconds = r.wall_seconds;
  } else {
    info->has_reference = 1;
    info->min_dt = std::numeric_limits<double>::infinity();
    for (const auto& s : run->one_d) {
      info->steps = std::max(info->steps, s.series.steps);
      info->time = s.t_final;
      info->linf[0] = std::max(info->linf[0], s.series.final_linf());
      info->centerline_l2 = std::max(info->centerline_l2, s.series.final_l2());
      for (std::size_t k = 1; k < s.series.dt.size(); ++k) info->min_dt = std::min(info->min_dt, s.series.dt[k]);
    }
    info->centerline_linf = info->linf[0];
  }
  return LX_OK;
}

lx_status lx_run_write_log(const lx_run* run, lx_sink sink, void* user) {
  if (!run) return fail(LX_ERR_USAGE, "lx_run_write_log: NULL run");
  return guarded([&] {
    if (run->two_d) {
      std::ostringstream os;
      write_log_csv(os, run->two_d->log);
      emit(sink, user, os.str());
    } else {
      emit(sink, user, series_csv(run->one_d));
    }
    return LX_OK;
  });
}

lx_status lx_run_write_field(const lx_run* run, lx_sink sink, void* user) {
  if (!run) return fail(LX_ERR_USAGE, "lx_run_write_field: NULL run");
  return guarded([&] {
    if (run->two_d) {
      emit(sink, user, field_text(*run->two_d));
    } else {
      for (std::size_t k = 0; k < run->one_d.size(); ++k) {
        const auto text = profile_csv(run->one_d[k], true);
        emit(sink, user, k == 0 ? text : text.substr(text.find('\n') + 1));
      }
    }
    return LX_OK;
  });
}

lx_status lx_converge(const lx_scenario* scenario, const int* sizes, size_t count, lx_sink csv, void* csv_user,
                      lx_sink table, void* table_user, double* order_l2, double* order_linf, int* order_defined) {
  if (!scenario) return fail(LX_ERR_USAGE, "lx_converge: NULL scenario");
  if (!sizes && count > 0) return fail(LX_ERR_USAGE, "lx_converge: NULL size list");
  return guarded([&] {
    std::vector<int> list = sizes ? std::vector<int>(sizes, sizes + count) : scenario->cfg.mesh.refinements;
    if (list.empty()) return fail(LX_ERR_CONFIG, "no mesh sizes given and the scenario lists no refinements");
    const auto rep = converge(scenario->cfg, list);
    std::ostringstream c, t;
    write_convergence_csv(c, rep);
    write_convergence_table(t, rep);
    emit(csv, csv_user, c.str());
    emit(table, table_user, t.str());
    if (order_l2) *order_l2 = rep.order_l2;
    if (order_linf) *order_linf = rep.order_linf;
    if (order_defined) *order_defined = rep.order_defined ? 1 : 0;
    return rep.partial ? fail(LX_ERR_NUMERICAL, "at least one mesh did not complete; report is partial") : LX_OK;
  });
}

}  // extern "C"
