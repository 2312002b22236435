#ifndef MSIM_MSIM_H
#define MSIM_MSIM_H

/* C interface of the msim shared library.
 *
 * Every function returns an msim_status; on failure a thread-local message
 * is available from msim_last_error(). Objects are opaque handles released
 * with their matching *_free function. Strings returned through char**
 * out-parameters are heap copies released with msim_string_free. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(MSIM_BUILDING)
#define MSIM_API __declspec(dllexport)
#else
#define MSIM_API __declspec(dllimport)
#endif
#else
#define MSIM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum msim_status {
  MSIM_OK = 0,
  MSIM_E_CONFIG = 1,      /* malformed or inconsistent input */
  MSIM_E_VALIDITY = 2,    /* negative probability at the configured phases */
  MSIM_E_STATISTICS = 3,  /* simulated counts disagree with the prediction */
  MSIM_E_UNSUPPORTED_TIMING = 4,
  MSIM_E_ARGUMENT = 5,    /* null handle or out-of-range enum */
  MSIM_E_IO = 6,
  MSIM_E_EMPTY_SELECTION = 7,
  MSIM_E_INTERNAL = 8
} msim_status;

typedef enum msim_theory { MSIM_THEORY_QM = 0, MSIM_THEORY_MS = 1 } msim_theory;

/* MSIM_TIMING_AUTO: the config's timing, else the class of its geometry. */
typedef enum msim_timing {
  MSIM_TIMING_AUTO = -1,
  MSIM_TIMING_T1 = 0,
  MSIM_TIMING_T2 = 1,
  MSIM_TIMING_T3 = 2
} msim_timing;

typedef enum msim_format { MSIM_FORMAT_TEXT = 0, MSIM_FORMAT_CSV = 1, MSIM_FORMAT_JSON = 2 } msim_format;

typedef enum msim_phase { MSIM_PHASE_ALPHA = 0, MSIM_PHASE_BETA = 1, MSIM_PHASE_GAMMA = 2 } msim_phase;

typedef enum msim_quantity {
  MSIM_Q_E_SIGMA_OMEGA = 0,
  MSIM_Q_E_SIGMA = 1,
  MSIM_Q_E_OMEGA = 2,
  MSIM_Q_MARGINAL_PLUS = 3
} msim_quantity;

typedef struct msim_config msim_config;
typedef struct msim_prediction msim_prediction;
typedef struct msim_classification msim_classification;
typedef struct msim_run msim_run;
typedef struct msim_audit msim_audit;

/* Joint table of subpopulation L, index 0 = "+", 1 = "-". */
typedef struct msim_prediction_values {
  double joint[2][2]; /* [sigma][omega] */
  double marginal_sigma[2];
  double e_sigma_omega;
  double e_sigma;
  double e_omega;
  int valid;
} msim_prediction_values;

typedef struct msim_estimate_values {
  uint64_t counts[2][2]; /* [sigma][omega] */
  uint64_t selected;
  double e_sigma_omega, se_sigma_omega;
  double e_sigma, se_sigma;
  double e_omega, se_omega;
} msim_estimate_values;

typedef struct msim_link_rates {
  double both_fire;
  double neither_fires;
  double exactly_one;
} msim_link_rates;

MSIM_API const char* msim_version(void);
MSIM_API const char* msim_last_error(void);
MSIM_API void msim_string_free(char* s);

/* Configuration. */
MSIM_API msim_status msim_config_default(msim_config** out);
MSIM_API msim_status msim_config_load_file(const char* path, msim_config** out);
MSIM_API msim_status msim_config_load_string(const char* text, msim_config** out);
MSIM_API msim_status msim_config_emit(const msim_config* cfg, char** out);
MSIM_API msim_status msim_config_warnings(const msim_config* cfg, char** out);
MSIM_API msim_status msim_config_hash(const msim_config* cfg, uint64_t* out);
MSIM_API msim_status msim_config_get_phases(const msim_config* cfg, double* alpha, double* beta, double* gamma);
MSIM_API msim_status msim_config_set_phases(msim_config* cfg, double alpha, double beta, double gamma);
MSIM_API msim_status msim_config_set_theory(msim_config* cfg, msim_theory theory);
MSIM_API msim_status msim_config_set_timing(msim_config* cfg, msim_timing timing);
MSIM_API msim_status msim_config_set_trials(msim_config* cfg, uint64_t trials);
MSIM_API msim_status msim_config_set_seed(msim_config* cfg, uint64_t seed);
MSIM_API msim_status msim_config_get_theory(const msim_config* cfg, msim_theory* out);
MSIM_API void msim_config_free(msim_config* cfg);

/* Effective timing of the config (AUTO resolution). */
MSIM_API msim_status msim_resolve_timing(const msim_config* cfg, msim_timing requested, msim_timing* out);

/* Closed-form predictions at the config's phases. */
MSIM_API msim_status msim_predict(const msim_config* cfg, msim_theory theory, msim_timing timing, msim_prediction** out);
MSIM_API msim_status msim_prediction_values_get(const msim_prediction* p, msim_prediction_values* out);
MSIM_API msim_status msim_prediction_render(const msim_prediction* p, msim_format format, char** out);
MSIM_API void msim_prediction_free(msim_prediction* p);

/* Before / non-before labels of the config's geometry. */
MSIM_API msim_status msim_classify(const msim_config* cfg, msim_classification** out);
/* *mixed = 1 if the paths disagree; *timing is MSIM_TIMING_AUTO when the
 * unanimous class has no rule (or the result is mixed). */
MSIM_API msim_status msim_classification_summary(const msim_classification* c, int* mixed, msim_timing* timing, char** label);
MSIM_API msim_status msim_classification_render(const msim_classification* c, msim_format format, char** out);
MSIM_API void msim_classification_free(msim_classification* c);

/* Monte Carlo run of the config; threads = 0 picks the hardware count. */
MSIM_API msim_status msim_simulate(const msim_config* cfg, unsigned threads, msim_run** out);
MSIM_API msim_status msim_run_event_count(const msim_run* run, uint64_t* out);
MSIM_API msim_status msim_run_write_events(const msim_run* run, const char* path);
MSIM_API msim_status msim_run_estimate(const msim_run* run, msim_estimate_values* out);
MSIM_API msim_status msim_run_estimate_render(const msim_run* run, msim_format format, char** out);
MSIM_API msim_status msim_run_spectrum_render(const msim_run* run, double bin_width, msim_format format, char** out);
/* MSIM_E_STATISTICS if any windowed quantity deviates by more than nsigma
 * standard errors from the prediction; *report describes every check. */
MSIM_API msim_status msim_run_check(const msim_run* run, double nsigma, char** report);
MSIM_API void msim_run_free(msim_run* run);

/* QM vs MS over one phase; CSV or JSON. */
MSIM_API msim_status msim_scan(const msim_config* cfg, msim_timing timing, msim_phase parameter, double from, double to, int steps, msim_quantity quantity, msim_format format, char** out);

MSIM_API msim_status msim_detector_link_rates(msim_link_rates* out);

/* Non-selective photon-1 marginal over a grid_steps^3 phase grid. */
MSIM_API msim_status msim_audit_run(msim_theory theory, msim_timing timing, int grid_steps, msim_audit** out);
MSIM_API msim_status msim_audit_ok(const msim_audit* a, int* ok);
MSIM_API msim_status msim_audit_render(const msim_audit* a, msim_format format, char** out);
MSIM_API void msim_audit_free(msim_audit* a);

#ifdef __cplusplus
}
#endif

#endif /* MSIM_MSIM_H */
