// Command-line front end. Everything goes through the C interface.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "lavaimex/lavaimex.h"

namespace {

void to_file(const char* data, size_t size, void* user) { std::fwrite(data, 1, size, static_cast<FILE*>(user)); }

int report(lx_status s) {
  if (s != LX_OK && s != LX_CHECK_FAILED) std::fprintf(stderr, "lavaimex: %s\n", lx_last_error());
  return static_cast<int>(s);
}

// Output target that is stdout unless a path was given.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_ = std::fopen(path.c_str(), "w");
      owned_ = file_ != nullptr;
    }
  }
  ~Output() {
    if (owned_) std::fclose(file_);
  }
  Output(const Output&) = delete;
  Output& operator=(const Output&) = delete;
  bool ok() const { return file_ != nullptr; }
  FILE* get() const { return file_; }

 private:
  FILE* file_ = stdout;
  bool owned_ = false;
};

struct PairHandle {
  lx_pair* p = nullptr;
  ~PairHandle() { lx_pair_destroy(p); }
};

struct ScenarioHandle {
  lx_scenario* s = nullptr;
  ~ScenarioHandle() { lx_scenario_destroy(s); }
};

// A scenario argument is a file path or the name of a built-in.
lx_status open_scenario(const std::string& arg, ScenarioHandle& h) {
  if (std::filesystem::is_regular_file(arg)) return lx_scenario_load(arg.c_str(), &h.s);
  for (size_t i = 0; i < lx_builtin_count(); ++i)
    if (arg == lx_builtin_name(i)) return lx_scenario_builtin(arg.c_str(), &h.s);
  return lx_scenario_load(arg.c_str(), &h.s);  // reports the missing file
}

lx_status apply(ScenarioHandle& h, const std::vector<std::string>& keys, const std::string& pair) {
  for (const auto& k : keys)
    if (lx_status s = lx_scenario_set(h.s, k.c_str()); s != LX_OK) return s;
  if (!pair.empty()) return lx_scenario_set(h.s, ("pair=" + pair).c_str());
  return LX_OK;
}

void print_info(const lx_run_info& info) {
  std::printf("status = %s\n", info.status);
  if (info.message[0]) std::printf("message = %s\n", info.message);
  std::printf("steps = %d\ntime = %.17g\nmin_dt = %.17g\n", info.steps, info.time, info.min_dt);
  std::printf("mass_balance_error = %.17g\n", info.mass_balance_error);
  if (info.has_reference) {
    std::printf("linf_h = %.17g\nlinf_hu = %.17g\nlinf_hv = %.17g\nlinf_hT = %.17g\n", info.linf[0], info.linf[1],
                info.linf[2], info.linf[3]);
    std::printf("centerline_l2 = %.17g\ncenterline_linf = %.17g\n", info.centerline_l2, info.centerline_linf);
  }
  std::printf("wall_seconds = %.6g\n", info.wall_seconds);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IMEX Runge-Kutta staggered solver for lava flow: tableau checks, stability analysis and scenario runs"};
  app.require_subcommand(1);
  int code = 0;

  // tableau check
  auto* tableau = app.add_subcommand("tableau", "Butcher tableau utilities");
  tableau->require_subcommand(1);
  auto* check = tableau->add_subcommand("check", "Order, coupling, stiff-accuracy, DAE and I-stability conditions");
  std::string check_pair = "MAX_NU";
  std::string check_dump;
  check->add_option("--pair", check_pair, "MAX_NU, C_EQ_CTILDE or a tableau file")->capture_default_str();
  check->add_option("--write", check_dump, "Also write the tableau pair to this file");
  check->callback([&] {
    PairHandle p;
    if (lx_status s = lx_pair_create(check_pair.c_str(), &p.p); s != LX_OK) {
      code = report(s);
      return;
    }
    if (!check_dump.empty()) {
      Output out(check_dump);
      if (!out.ok()) {
        std::fprintf(stderr, "lavaimex: cannot write '%s'\n", check_dump.c_str());
        code = LX_ERR_USAGE;
        return;
      }
      lx_pair_write(p.p, to_file, out.get());
    }
    int pass = 0;
    code = report(lx_tableau_check(p.p, to_file, stdout, &pass));
  });

  // stability sweep / certify
  auto* stability = app.add_subcommand("stability", "Von Neumann analysis of the fully discrete scheme");
  stability->require_subcommand(1);
  auto* sweep = stability->add_subcommand("sweep", "CSV of |G| over reaction number and phase");
  std::string sweep_pair = "MAX_NU", sweep_out;
  double sweep_nu = 1.22;
  int sweep_theta = 720;
  sweep->add_option("--pair", sweep_pair, "MAX_NU, C_EQ_CTILDE or a tableau file")->capture_default_str();
  sweep->add_option("--courant", sweep_nu, "Courant number")->capture_default_str();
  sweep->add_option("--theta-points", sweep_theta, "Phase samples on [0, 2pi)")->capture_default_str();
  sweep->add_option("-o,--output", sweep_out, "CSV file (default stdout)");
  sweep->callback([&] {
    PairHandle p;
    if (lx_status s = lx_pair_create(sweep_pair.c_str(), &p.p); s != LX_OK) {
      code = report(s);
      return;
    }
    Output out(sweep_out);
    if (!out.ok()) {
      std::fprintf(stderr, "lavaimex: cannot write '%s'\n", sweep_out.c_str());
      code = LX_ERR_USAGE;
      return;
    }
    code = report(lx_stability_sweep(p.p, sweep_nu, sweep_theta, to_file, out.get()));
  });

  auto* certify = stability->add_subcommand("certify", "Tableau conditions plus space-time L-stability certificate");
  std::string cert_pair = "MAX_NU";
  certify->add_option("--pair", cert_pair, "MAX_NU, C_EQ_CTILDE or a tableau file")->capture_default_str();
  certify->callback([&] {
    PairHandle p;
    if (lx_status s = lx_pair_create(cert_pair.c_str(), &p.p); s != LX_OK) {
      code = report(s);
      return;
    }
    int stable = 0;
    code = report(lx_stability_certify(p.p, to_file, stdout, &stable));
  });

  // run1d
  auto* run1d = app.add_subcommand("run1d", "Linear advection-reaction in one dimension");
  lx_run1d_options o1;
  lx_run1d_defaults(&o1);
  std::string case_name = "advreact", run1d_pair = "MAX_NU", run1d_out;
  run1d->add_option("--case", case_name, "reaction, advreact or alternating")
      ->check(CLI::IsMember({"reaction", "advreact", "alternating"}))
      ->capture_default_str();
  run1d->add_option("--pair", run1d_pair, "MAX_NU, C_EQ_CTILDE or a tableau file")->capture_default_str();
  run1d->add_option("--cells", o1.cells, "Number of cells (default: built-in)");
  run1d->add_option("--courant", o1.courant, "Courant number (default: built-in)");
  run1d->add_option("--chi", o1.reaction_rate, "Reaction rate (default: first built-in rate)");
  run1d->add_option("--t-final", o1.t_final, "Final time (default: built-in)");
  run1d->add_option("-o,--output", run1d_out, "CSV file (default stdout)");
  run1d->callback([&] {
    PairHandle p;
    if (lx_status s = lx_pair_create(run1d_pair.c_str(), &p.p); s != LX_OK) {
      code = report(s);
      return;
    }
    Output out(run1d_out);
    if (!out.ok()) {
      std::fprintf(stderr, "lavaimex: cannot write '%s'\n", run1d_out.c_str());
      code = LX_ERR_USAGE;
      return;
    }
    o1.case_name = case_name.c_str();
    double linf = 0.0, l2 = 0.0;
    code = report(lx_run1d(&o1, p.p, to_file, out.get(), &linf, &l2));
    if (code == 0) std::fprintf(stderr, "# case=%s pair=%s linf=%.17g l2=%.17g\n", case_name.c_str(),
                                lx_pair_name(p.p), linf, l2);
  });

  // run
  auto* run = app.add_subcommand("run", "Run a scenario file or built-in scenario");
  std::string run_target, run_pair, run_dir;
  std::vector<std::string> run_keys;
  bool run_print = false;
  run->add_option("scenario", run_target, "Scenario file or built-in name")->required();
  run->add_option("--key", run_keys, "Override, section.name=value (repeatable)");
  run->add_option("--pair", run_pair, "Override the Butcher pair");
  run->add_option("--output-dir", run_dir, "Directory for log, snapshots and final field");
  run->add_flag("--print-config", run_print, "Print the resolved scenario and exit");
  run->callback([&] {
    ScenarioHandle h;
    if (lx_status s = open_scenario(run_target, h); s != LX_OK) {
      code = report(s);
      return;
    }
    if (lx_status s = apply(h, run_keys, run_pair); s != LX_OK) {
      code = report(s);
      return;
    }
    if (run_print) {
      code = report(lx_scenario_write(h.s, to_file, stdout));
      return;
    }
    lx_run* r = nullptr;
    const lx_status s = lx_scenario_run(h.s, run_dir.empty() ? nullptr : run_dir.c_str(), &r);
    if (r) {
      lx_run_info info;
      lx_run_info_get(r, &info);
      print_info(info);
      lx_run_destroy(r);
    }
    code = report(s);
  });

  // converge
  auto* conv = app.add_subcommand("converge", "Mesh refinement study against the exact solution");
  std::string conv_target, conv_pair, conv_csv;
  std::vector<int> conv_sizes;
  std::vector<std::string> conv_keys;
  conv->add_option("scenario", conv_target, "Scenario file or built-in name")->required();
  conv->add_option("--sizes", conv_sizes, "Cell counts along x (default: scenario refinements)")->delimiter(',');
  conv->add_option("--pair", conv_pair, "Override the Butcher pair");
  conv->add_option("--key", conv_keys, "Override, section.name=value (repeatable)");
  conv->add_option("--csv", conv_csv, "Write per-mesh rows to this CSV file");
  conv->callback([&] {
    ScenarioHandle h;
    if (lx_status s = open_scenario(conv_target, h); s != LX_OK) {
      code = report(s);
      return;
    }
    if (lx_status s = apply(h, conv_keys, conv_pair); s != LX_OK) {
      code = report(s);
      return;
    }
    FILE* csv = nullptr;
    if (!conv_csv.empty() && !(csv = std::fopen(conv_csv.c_str(), "w"))) {
      std::fprintf(stderr, "lavaimex: cannot write '%s'\n", conv_csv.c_str());
      code = LX_ERR_USAGE;
      return;
    }
    double l2 = 0.0, linf = 0.0;
    int defined = 0;
    code = report(lx_converge(h.s, conv_sizes.empty() ? nullptr : conv_sizes.data(), conv_sizes.size(),
                              csv ? to_file : nullptr, csv, to_file, stdout, &l2, &linf, &defined));
    if (csv) std::fclose(csv);
  });

  // scenario list / show
  auto* scen = app.add_subcommand("scenario", "Inspect built-in scenarios");
  scen->require_subcommand(1);
  auto* list = scen->add_subcommand("list", "Names of the built-in scenarios");
  list->callback([&] {
    for (size_t i = 0; i < lx_builtin_count(); ++i) std::printf("%s\n", lx_builtin_name(i));
  });
  auto* show = scen->add_subcommand("show", "Print a built-in scenario as a scenario file");
  std::string show_name;
  show->add_option("name", show_name, "Built-in name")->required();
  show->callback([&] {
    ScenarioHandle h;
    if (lx_status s = lx_scenario_builtin(show_name.c_str(), &h.s); s != LX_OK) {
      code = report(s);
      return;
    }
    code = report(lx_scenario_write(h.s, to_file, stdout));
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : LX_ERR_USAGE;
  }
  return code;
}
