#ifndef LSCIML_LSCIML_H
#define LSCIML_LSCIML_H

/*
 * C interface to the lsciml toolkit: Lorenz ground truth, Neural ODE and
 * UDE training, forecasting breakdown analysis and sweeps.
 *
 * All functions returning lsciml_status report failures through the status
 * code; lsciml_last_error() then describes the most recent failure on the
 * calling thread. Handles are opaque and owned by the caller, who releases
 * them with the matching *_free function (passing NULL is allowed).
 */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#  if defined(LSCIML_BUILDING)
#    define LSCIML_API __declspec(dllexport)
#  else
#    define LSCIML_API __declspec(dllimport)
#  endif
#else
#  define LSCIML_API __attribute__((visibility("default")))
#endif

/* Values double as CLI exit codes. */
typedef enum lsciml_status {
  LSCIML_OK = 0,
  LSCIML_ERR_INTERNAL = 1,
  LSCIML_ERR_CONFIG = 2,
  LSCIML_ERR_BLOWUP = 3,
  LSCIML_ERR_DIVERGED = 4,
  LSCIML_ERR_INVALID_ARGUMENT = 5,
  LSCIML_ERR_IO = 6
} lsciml_status;

typedef enum lsciml_kind {
  LSCIML_KIND_ANY = -1, /* take the kind from the config file (node if absent) */
  LSCIML_KIND_NODE = 0,
  LSCIML_KIND_UDE = 1
} lsciml_kind;

typedef struct lsciml_trajectory lsciml_trajectory;
typedef struct lsciml_config lsciml_config;
typedef struct lsciml_report lsciml_report;

/* Called once per training iteration. */
typedef void (*lsciml_progress_fn)(int iteration, double loss, void* user_data);

LSCIML_API const char* lsciml_version(void);
/* Message for the last failed call on this thread ("" if none). */
LSCIML_API const char* lsciml_last_error(void);
/* Config key responsible for the last LSCIML_ERR_CONFIG ("" if none). */
LSCIML_API const char* lsciml_last_error_key(void);

/* ---- dynamics ---------------------------------------------------------- */

LSCIML_API lsciml_status lsciml_lorenz_rhs(const double state[3], double sigma, double rho,
                                           double beta, double out[3]);

/* RK4 ground truth (internal step 0.01) sampled every save_dt on [t0, t1]. */
LSCIML_API lsciml_status lsciml_simulate(const double u0[3], double sigma, double rho,
                                         double beta, double t0, double t1, double save_dt,
                                         lsciml_trajectory** out);

LSCIML_API size_t lsciml_trajectory_size(const lsciml_trajectory* traj);
LSCIML_API lsciml_status lsciml_trajectory_sample(const lsciml_trajectory* traj, size_t index,
                                                  double* time, double state[3]);
LSCIML_API lsciml_status lsciml_trajectory_write_csv(const lsciml_trajectory* traj,
                                                     const char* path);
LSCIML_API void lsciml_trajectory_free(lsciml_trajectory* traj);

/* ---- configuration ----------------------------------------------------- */

LSCIML_API lsciml_status lsciml_config_load(const char* path, lsciml_kind kind,
                                            lsciml_config** out);
LSCIML_API lsciml_status lsciml_config_parse(const char* text, lsciml_kind kind,
                                             lsciml_config** out);
LSCIML_API lsciml_status lsciml_config_set(lsciml_config* config, const char* key,
                                           const char* value);
/* Writes the config in `key = value` form; returns the length needed. */
LSCIML_API size_t lsciml_config_dump(const lsciml_config* config, char* buffer, size_t size);
LSCIML_API void lsciml_config_free(lsciml_config* config);

/* ---- commands ---------------------------------------------------------- */

/* Creates `dir`; fails with LSCIML_ERR_CONFIG if it is non-empty and
   overwrite is 0. */
LSCIML_API lsciml_status lsciml_prepare_output_dir(const char* dir, int overwrite);

/* Writes trajectory.csv for [train_t0, train_t1]. */
LSCIML_API lsciml_status lsciml_cmd_simulate(const lsciml_config* config, const char* out_dir);

/* Train, forecast, breakdown and (UDE) term recovery; writes the report
   directory. `report` may be NULL. A diverged run still writes a partial
   report and returns LSCIML_ERR_DIVERGED. */
LSCIML_API lsciml_status lsciml_cmd_train(const lsciml_config* config, lsciml_kind kind,
                                          const char* out_dir, lsciml_progress_fn progress,
                                          void* user_data, lsciml_report** report);

/* One subdirectory per arm plus summary.csv sorted by final loss. Arm
   failures are recorded in their reports and do not fail the sweep. */
LSCIML_API lsciml_status lsciml_cmd_sweep(const lsciml_config* config, const char* out_dir,
                                          int workers);

/* Reads two report directories; writes comparison.csv and comparison.json. */
LSCIML_API lsciml_status lsciml_cmd_compare(const char* node_report_dir,
                                            const char* ude_report_dir, const char* out_dir);

/* As lsciml_cmd_compare, taking the directories from the config keys
   node_report and ude_report. */
LSCIML_API lsciml_status lsciml_cmd_compare_config(const lsciml_config* config,
                                                   const char* out_dir);

/* ---- reports ----------------------------------------------------------- */

/* Reads report.json and, when present, loss.csv. */
LSCIML_API lsciml_status lsciml_report_load(const char* report_dir, lsciml_report** out);
LSCIML_API int lsciml_report_ok(const lsciml_report* report);
LSCIML_API double lsciml_report_final_loss(const lsciml_report* report);
/* Returns 1 and stores the time when a breakdown was detected, else 0. */
LSCIML_API int lsciml_report_breakdown_time(const lsciml_report* report, double* time);
LSCIML_API size_t lsciml_report_history_size(const lsciml_report* report);
/* Copies min(size, history length) entries. */
LSCIML_API size_t lsciml_report_history(const lsciml_report* report, double* out, size_t size);
LSCIML_API void lsciml_report_free(lsciml_report* report);

#ifdef __cplusplus
}
#endif

#endif /* LSCIML_LSCIML_H */
