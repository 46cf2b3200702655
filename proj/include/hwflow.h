/* C interface to the branching-coalescing flow toolkit.
 *
 * Every function returns a status code; on failure the per-thread
 * message from hwflow_last_error() describes what went wrong. Handles
 * are opaque and must be released with their matching free function.
 */
#ifndef HWFLOW_H
#define HWFLOW_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define HWFLOW_API __declspec(dllexport)
#else
#define HWFLOW_API __attribute__((visibility("default")))
#endif

typedef enum hwflow_status {
  HWFLOW_OK = 0,
  HWFLOW_ERR_INVALID_ARG = 1,
  HWFLOW_ERR_NOT_PROBABILITY = 2,
  HWFLOW_ERR_INFINITE_B = 3,
  HWFLOW_ERR_EPS_TOO_LARGE = 4,
  HWFLOW_ERR_DEGENERATE_SPLIT = 5,
  HWFLOW_ERR_INVALID_THETA = 6,
  HWFLOW_ERR_THETA_TOO_SMALL = 7,
  HWFLOW_ERR_OUT_OF_WINDOW = 8,
  HWFLOW_ERR_MISSING_MARK = 9,
  HWFLOW_ERR_BAD_SPEEDS = 10,
  HWFLOW_ERR_INFINITE_SPEED = 11,
  HWFLOW_ERR_WINDOW_TOO_SMALL = 12,
  HWFLOW_ERR_CONFIG = 13,
  HWFLOW_ERR_GATE_FAILURE = 14,
  HWFLOW_ERR_IO = 15,
  HWFLOW_ERR_UNKNOWN = 100
} hwflow_status;

/* Message describing the most recent failure on this thread. */
HWFLOW_API const char* hwflow_last_error(void);

/* ----------------------------------------------------------- measures */

/* Finite measure on [0,1]: atoms plus weighted Beta densities. */
typedef struct hwflow_measure hwflow_measure;

HWFLOW_API hwflow_status hwflow_measure_create(hwflow_measure** out);
/* Parses the `atoms = [[q, w], ...]` / `beta = [[a, b, w], ...]` text
 * form produced by hwflow_measure_to_text. */
HWFLOW_API hwflow_status hwflow_measure_parse(const char* text,
                                              hwflow_measure** out);
HWFLOW_API void hwflow_measure_free(hwflow_measure* m);

HWFLOW_API hwflow_status hwflow_measure_add_atom(hwflow_measure* m, double q,
                                                 double w);
HWFLOW_API hwflow_status hwflow_measure_add_beta(hwflow_measure* m, double a,
                                                 double b, double w);

/* integral of q^k (1-q)^l, closed form; k, l >= 0. */
HWFLOW_API hwflow_status hwflow_measure_moment(const hwflow_measure* m, int k,
                                               int l, double* out);
HWFLOW_API hwflow_status hwflow_measure_total_mass(const hwflow_measure* m,
                                                   double* out);
/* Serializes into buf (nul-terminated) when it fits; *needed always
 * receives the required size including the terminator. */
HWFLOW_API hwflow_status hwflow_measure_to_text(const hwflow_measure* m,
                                                char* buf, size_t buflen,
                                                size_t* needed);

/* Stickiness parameter 2 nu([0,1]) and the left/right extremal speeds
 * of the flow (drift beta, splitting measure nu). Speeds may be
 * +-infinity. */
HWFLOW_API hwflow_status hwflow_speeds(const hwflow_measure* nu, double beta,
                                       double* theta, double* beta_minus,
                                       double* beta_plus);

/* ------------------------------------------------- closed-form curves */

/* Exact density at time t of the branching-coalescing point set started
 * from the full line, arrow means b_minus <= b_plus. */
HWFLOW_API hwflow_status hwflow_density_exact(double b_minus, double b_plus,
                                              int t, double* out);
/* Continuum counterpart e^{-b^2 t}/sqrt(pi t) + 2 b Phi(b sqrt(2 t)). */
HWFLOW_API hwflow_status hwflow_psi_continuum(double b, double t,
                                              double* out);

/* --------------------------------------------------------- experiments */

/* Runs the experiment described by the config file and writes
 * report.csv and manifest.json into out_dir. threads = 0 and
 * has_seed_override = 0 defer to the config. *gates_passed receives 1
 * iff every declared gate passed; the status reports only operational
 * failures (bad config, I/O), not gate outcomes. */
HWFLOW_API hwflow_status hwflow_run_experiment(const char* config_path,
                                               const char* out_dir,
                                               int has_seed_override,
                                               uint64_t seed_override,
                                               int threads,
                                               int* gates_passed);

#ifdef __cplusplus
}
#endif

#endif /* HWFLOW_H */
