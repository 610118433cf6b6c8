/* C interface to the lavaimex solver library.
 *
 * Every function returns an lx_status. On failure a message describing the
 * error is available from lx_last_error() until the next call on the same
 * thread. Handles are opaque and must be released with the matching
 * *_destroy function; destroying NULL is a no-op.
 *
 * Text output (reports, CSV, scenario files, field dumps) is delivered in
 * chunks to an lx_sink supplied by the caller. Numbers are printed with 17
 * significant digits. */
#ifndef LAVAIMEX_H
#define LAVAIMEX_H

#include <stddef.h>

#if defined(_WIN32)
#define LX_API __declspec(dllexport)
#elif defined(__GNUC__)
#define LX_API __attribute__((visibility("default")))
#else
#define LX_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes double as the command-line exit codes. */
typedef enum lx_status {
  LX_OK = 0,
  LX_ERR_USAGE = 1,     /* invalid argument, NULL handle, unreadable input file */
  LX_ERR_CONFIG = 2,    /* malformed or out-of-range configuration */
  LX_ERR_NUMERICAL = 3, /* NaN/Inf, singular matrix or time-step collapse */
  LX_ERR_INTERNAL = 4,  /* unexpected failure inside the library */
  LX_CHECK_FAILED = 5   /* a certification ran to completion and did not pass */
} lx_status;

typedef void (*lx_sink)(const char* data, size_t size, void* user);

typedef struct lx_pair lx_pair;
typedef struct lx_scenario lx_scenario;
typedef struct lx_run lx_run;

LX_API const char* lx_version(void);
LX_API const char* lx_last_error(void);

/* ---- Butcher pairs ------------------------------------------------------ */

/* "MAX_NU", "C_EQ_CTILDE" or the path of a plain-text tableau file. */
LX_API lx_status lx_pair_create(const char* name_or_path, lx_pair** out);
LX_API void lx_pair_destroy(lx_pair* pair);
LX_API const char* lx_pair_name(const lx_pair* pair);
LX_API lx_status lx_pair_write(const lx_pair* pair, lx_sink sink, void* user);

/* Order, coupling, stiff-accuracy, DAE and I-stability report.
 * *all_pass is set to 1 or 0; returns LX_CHECK_FAILED when it is 0. */
LX_API lx_status lx_tableau_check(const lx_pair* pair, lx_sink sink, void* user, int* all_pass);

/* Space-time L-stability certificate at the reference Courant number.
 * Returns LX_CHECK_FAILED when the pair is not space-time L-stable. */
LX_API lx_status lx_stability_certify(const lx_pair* pair, lx_sink sink, void* user, int* l_stable);

/* CSV of |G| over the default reaction-number grid and theta_points phases. */
LX_API lx_status lx_stability_sweep(const lx_pair* pair, double courant, int theta_points, lx_sink sink,
                                    void* user);

LX_API lx_status lx_amplification(const lx_pair* pair, double courant, double phi, double theta, double* re,
                                  double* im);
LX_API lx_status lx_courant_bound(double a32, double* out);
LX_API double lx_optimal_a32(void);
LX_API double lx_optimal_courant_bound(void);

/* ---- One-dimensional runs ---------------------------------------------- */

typedef struct lx_run1d_options {
  const char* case_name; /* "reaction", "advreact" or "alternating" */
  int cells;             /* <= 0: built-in value */
  double courant;        /* <= 0: built-in value (ignored by "reaction") */
  double reaction_rate;  /* < 0: first built-in rate */
  double t_final;        /* < 0: built-in value */
} lx_run1d_options;

LX_API void lx_run1d_defaults(lx_run1d_options* opts);

/* Final profile as CSV (t,x,q_numeric,q_exact,err). */
LX_API lx_status lx_run1d(const lx_run1d_options* opts, const lx_pair* pair, lx_sink csv, void* user,
                          double* linf, double* l2);

/* ---- Scenarios ---------------------------------------------------------- */

LX_API lx_status lx_scenario_builtin(const char* name, lx_scenario** out);
LX_API lx_status lx_scenario_load(const char* path, lx_scenario** out);
LX_API void lx_scenario_destroy(lx_scenario* scenario);
/* "section.key=value"; top-level keys have no section. */
LX_API lx_status lx_scenario_set(lx_scenario* scenario, const char* assignment);
LX_API lx_status lx_scenario_write(const lx_scenario* scenario, lx_sink sink, void* user);
LX_API lx_status lx_scenario_save(const lx_scenario* scenario, const char* path);
LX_API int lx_scenario_is_1d(const lx_scenario* scenario);
LX_API size_t lx_builtin_count(void);
LX_API const char* lx_builtin_name(size_t index);

typedef struct lx_run_info {
  const char* status; /* completed | step_limit | stiffness_collapse | numerical_failure */
  const char* message;
  int steps;
  double time;
  double min_dt;
  double mass_balance_error;
  int has_reference;
  double linf[4]; /* h, hu, hv, hT against the exact solution */
  double centerline_l2;
  double centerline_linf;
  double wall_seconds;
} lx_run_info;

/* Runs a scenario. When output_dir is non-NULL (or the scenario names an
 * output directory) the step log, periodic snapshots and the final field
 * are written there, also after a mid-run failure.
 * The run handle is produced whenever the run started, including when the
 * status is LX_ERR_NUMERICAL, so the log can still be inspected. */
LX_API lx_status lx_scenario_run(const lx_scenario* scenario, const char* output_dir, lx_run** out);
LX_API void lx_run_destroy(lx_run* run);
LX_API lx_status lx_run_info_get(const lx_run* run, lx_run_info* info);
LX_API lx_status lx_run_write_log(const lx_run* run, lx_sink sink, void* user);
LX_API lx_status lx_run_write_field(const lx_run* run, lx_sink sink, void* user);

/* Mesh refinement study. sizes may be NULL to use the scenario's list.
 * csv receives per-mesh rows, table a human-readable summary (either may be
 * NULL). *order_defined is 0 when fewer than two meshes completed. */
LX_API lx_status lx_converge(const lx_scenario* scenario, const int* sizes, size_t count, lx_sink csv,
                             void* csv_user, lx_sink table, void* table_user, double* order_l2,
                             double* order_linf, int* order_defined);

#ifdef __cplusplus
}
#endif

#endif /* LAVAIMEX_H */
