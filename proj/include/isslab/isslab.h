#ifndef ISSLAB_ISSLAB_H
#define ISSLAB_ISSLAB_H

/* C interface of the isslab core. Every function returning int reports an
 * ISSLAB_* status; on failure isslab_last_error() describes the cause for the
 * calling thread. Handles are opaque and released with the matching _free. */

#include <stddef.h>

#if defined(ISSLAB_BUILDING_LIBRARY)
#define ISSLAB_API __attribute__((visibility("default")))
#else
#define ISSLAB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

enum {
  ISSLAB_OK = 0,
  ISSLAB_E_DOMAIN = 1,
  ISSLAB_E_DIMENSION = 2,
  ISSLAB_E_ITERATION = 3,
  ISSLAB_E_DIVERGENCE = 4,
  ISSLAB_E_CONFIG = 5,
  ISSLAB_E_IO = 6,
  ISSLAB_E_INTERNAL = 7,
  ISSLAB_E_ARGUMENT = 8
};

enum { ISSLAB_KERNEL_K = 0, ISSLAB_KERNEL_L = 1, ISSLAB_KERNEL_M = 2, ISSLAB_KERNEL_N = 3 };

typedef struct isslab_kernel isslab_kernel;
typedef struct isslab_gains isslab_gains;
typedef struct isslab_scenario isslab_scenario;
typedef struct isslab_trace isslab_trace;

/* Message of the last failure on this thread ("" when none). */
ISSLAB_API const char* isslab_last_error(void);
ISSLAB_API const char* isslab_status_name(int status);

/* Text results are copied into buf (NUL-terminated, truncated to cap) and the
 * full length without the terminator is stored in *needed when non-null. */

/* Kernels on the uniform triangle grid with n nodes per side. */
ISSLAB_API int isslab_kernel_build(int kind, size_t n, double c0, double q,
                                   isslab_kernel** out);
ISSLAB_API int isslab_kernel_invert(const isslab_kernel* direct, isslab_kernel** out);
ISSLAB_API int isslab_kernel_size(const isslab_kernel* kernel, size_t* n);
ISSLAB_API int isslab_kernel_value(const isslab_kernel* kernel, size_t i, size_t j,
                                   double* value);
ISSLAB_API int isslab_kernel_residual(const isslab_kernel* kernel, double* interior_max,
                                      double* bc_max, double* diag_max);
ISSLAB_API int isslab_kernel_write_csv(const isslab_kernel* kernel, const char* path);
ISSLAB_API void isslab_kernel_free(isslab_kernel* kernel);

/* Output-injection gains. */
ISSLAB_API int isslab_p0_validate(double p0, double c0, double q, int* valid,
                                  double* margin);
ISSLAB_API int isslab_gains_solve(const isslab_kernel* m, double p0, double q,
                                  isslab_gains** out);
ISSLAB_API int isslab_gains_compute_kp(isslab_gains* gains, const isslab_kernel* k);
ISSLAB_API int isslab_gains_size(const isslab_gains* gains, size_t* n);
/* Copies p (and kp when computed and kp is non-null) into arrays of length n. */
ISSLAB_API int isslab_gains_copy(const isslab_gains* gains, double* p, double* kp,
                                 size_t n);
ISSLAB_API int isslab_gains_info(const isslab_gains* gains, double* residual,
                                 int* iterations);
ISSLAB_API int isslab_gains_write(const isslab_gains* gains, const char* csv_path,
                                  const char* metadata_path);
ISSLAB_API void isslab_gains_free(isslab_gains* gains);

/* Scenarios: presets, key=value config files and single-setting overrides. */
ISSLAB_API int isslab_preset_names(char* buf, size_t cap, size_t* needed);
ISSLAB_API int isslab_scenario_preset(const char* name, isslab_scenario** out);
ISSLAB_API int isslab_scenario_load(const char* path, isslab_scenario** out);
ISSLAB_API int isslab_scenario_set(isslab_scenario* s, const char* key, const char* value);
ISSLAB_API int isslab_scenario_get(const isslab_scenario* s, const char* key, double* value);
ISSLAB_API int isslab_scenario_validate(const isslab_scenario* s);
ISSLAB_API int isslab_scenario_describe(const isslab_scenario* s, char* buf, size_t cap,
                                        size_t* needed);
/* Newline-separated warnings about initial data that violates the boundary
 * conditions at t = 0. */
ISSLAB_API int isslab_scenario_warnings(const isslab_scenario* s, char* buf, size_t cap,
                                        size_t* needed);
ISSLAB_API void isslab_scenario_free(isslab_scenario* s);

/* Runs the scenario in its mode. */
ISSLAB_API int isslab_simulate(const isslab_scenario* s, isslab_trace** out);
ISSLAB_API int isslab_trace_size(const isslab_trace* t, size_t* samples, size_t* nodes);
/* Copies the stored times and the primary sup norms (length samples). */
ISSLAB_API int isslab_trace_norms(const isslab_trace* t, double* times, double* linf,
                                  size_t samples);
ISSLAB_API int isslab_trace_field(const isslab_trace* t, size_t sample, double* values,
                                  size_t nodes);
ISSLAB_API int isslab_trace_write(const isslab_trace* t, const char* trace_path,
                                  const char* norms_path);
/* Log-linear decay fit of the mode's default norm over [t_lo, t_hi]; writes
 * the report to path when non-null. */
ISSLAB_API int isslab_trace_fit_decay(const isslab_trace* t, double t_lo, double t_hi,
                                      double* sigma, double* residual, const char* path);
ISSLAB_API void isslab_trace_free(isslab_trace* t);

/* Lyapunov functionals of a TargetDirect scenario; sigma <= 0 selects half of
 * the lower bound of c0 - lambda. Stores the largest per-step increase. */
ISSLAB_API int isslab_lyapunov(const isslab_scenario* s, double sigma, double r,
                               const char* path, double* max_increase);

/* Sup of the mode's default norm over [t_lo, t_hi] for each amplitude scale. */
ISSLAB_API int isslab_sweep(const isslab_scenario* base, const double* scales, size_t count,
                            double t_lo, double t_hi, double* sup_norms, const char* path);

/* Full property suite; one line per check. */
ISSLAB_API int isslab_verify(char* buf, size_t cap, size_t* needed, int* all_passed);

#ifdef __cplusplus
}
#endif

#endif
