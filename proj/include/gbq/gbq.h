/* C interface to the generalized Boussinesq toolkit.
 *
 * Every function that can fail returns a gbq_status; on failure gbq_last_error()
 * holds a message for the calling thread. Objects are opaque handles released
 * with their matching *_free function (NULL is accepted). Strings returned by
 * handles stay valid until the handle is freed. */
#ifndef GBQ_GBQ_H
#define GBQ_GBQ_H

#include <stddef.h>

#if defined(GBQ_BUILDING_LIBRARY)
#define GBQ_API __attribute__((visibility("default")))
#else
#define GBQ_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gbq_status {
  GBQ_OK = 0,
  GBQ_ERR_INVALID_ARGUMENT = 1,
  GBQ_ERR_GRID_MISMATCH = 2,
  GBQ_ERR_ILL_DEFINED = 3,
  GBQ_ERR_NOT_CONVERGED = 4,
  GBQ_ERR_BLOWUP_SUSPECTED = 5,
  GBQ_ERR_IO = 6,
  GBQ_ERR_OUT_OF_RANGE = 7,
  GBQ_ERR_PARSE = 8,
  GBQ_ERR_INTERNAL = 99
} gbq_status;

typedef struct gbq_config gbq_config;
typedef struct gbq_sweep gbq_sweep;
typedef struct gbq_ground_state gbq_ground_state;
typedef struct gbq_report gbq_report;

GBQ_API const char* gbq_version(void);
GBQ_API const char* gbq_last_error(void);
GBQ_API const char* gbq_status_name(gbq_status status);
GBQ_API void gbq_string_free(char* s);

/* Run configuration ("[section]" / "key = value" text). */
GBQ_API gbq_status gbq_config_load(const char* path, gbq_config** out);
GBQ_API gbq_status gbq_config_parse(const char* text, gbq_config** out);
/* key is "section.key", e.g. "model.alpha". The configuration is revalidated. */
GBQ_API gbq_status gbq_config_set(gbq_config* cfg, const char* key, const char* value);
/* Canonical text; release with gbq_string_free. */
GBQ_API gbq_status gbq_config_serialize(const gbq_config* cfg, char** text);
GBQ_API void gbq_config_free(gbq_config* cfg);

/* Sweep description. */
GBQ_API gbq_status gbq_sweep_load(const char* path, gbq_sweep** out);
GBQ_API gbq_status gbq_sweep_parse(const char* text, gbq_sweep** out);
GBQ_API void gbq_sweep_set_seed(gbq_sweep* sweep, unsigned long long seed);
GBQ_API void gbq_sweep_free(gbq_sweep* sweep);

/* Ground states of -Delta phi + phi = |phi|^(alpha-1) phi. */
typedef struct gbq_ground_state_options {
  double alpha;
  int dim;
  double box;    /* <= 0: 80, 40, 30 for d = 1, 2, 3 */
  int points;    /* <= 0: 2048, 256, 128 */
  double tol;    /* sup-norm change between iterates */
  int max_iter;
} gbq_ground_state_options;

typedef struct gbq_ground_state_info {
  double alpha;
  int dim;
  double h1_norm_sq;
  double c_star;
  double eta;
  double static_energy;
  double pohozaev_residual;
  double equation_residual;
  int iterations;
} gbq_ground_state_info;

GBQ_API void gbq_ground_state_options_default(gbq_ground_state_options* opts);
GBQ_API gbq_status gbq_ground_state_compute(const gbq_ground_state_options* opts, gbq_ground_state** out);
GBQ_API gbq_status gbq_ground_state_load(const char* checkpoint_path, gbq_ground_state** out);
GBQ_API gbq_status gbq_ground_state_save(const gbq_ground_state* gs, const char* checkpoint_path,
                                         const char* sidecar_path);
GBQ_API gbq_status gbq_ground_state_get_info(const gbq_ground_state* gs, gbq_ground_state_info* info);
GBQ_API void gbq_ground_state_free(gbq_ground_state* gs);

/* Commands. Each produces a report with a text summary and CSV text; a non-NULL
 * csv_path also writes the CSV there. */
GBQ_API gbq_status gbq_run_ground_state(const gbq_ground_state_options* opts, const char* out_path,
                                        gbq_report** report);
GBQ_API gbq_status gbq_run_evolve(const gbq_config* cfg, gbq_report** report);
GBQ_API gbq_status gbq_run_classify(const gbq_config* cfg, const char* ground_state_path, int confirm,
                                    const char* csv_path, gbq_report** report);
GBQ_API gbq_status gbq_run_sweep(const gbq_sweep* sweep, int jobs, int timing, const char* csv_path,
                                 gbq_report** report);

typedef struct gbq_decay_options {
  int dim;
  const double* shells;
  size_t n_shells;
  double width;
  int points;  /* <= 0: 4096, 512, 128 */
  double box;  /* <= 0: 1024, 512, 128 */
  const double* times;  /* NULL: five times spread below the wrap-around time */
  size_t n_times;
} gbq_decay_options;

GBQ_API gbq_status gbq_run_decay_test(const gbq_decay_options* opts, const char* csv_path, gbq_report** report);
GBQ_API gbq_status gbq_run_morawetz(const gbq_config* cfg, const double* radii, size_t n_radii, const char* csv_path,
                                    gbq_report** report);
GBQ_API gbq_status gbq_run_scattering(const gbq_config* cfg, double horizon, const char* csv_path,
                                      gbq_report** report);

GBQ_API const char* gbq_report_summary(const gbq_report* report);
GBQ_API const char* gbq_report_csv(const gbq_report* report);
/* Path the CSV was written to, "" when it was not written. */
GBQ_API const char* gbq_report_csv_path(const gbq_report* report);
/* Nonzero when a confirmation run contradicted its classification. */
GBQ_API int gbq_report_contradiction(const gbq_report* report);
GBQ_API void gbq_report_free(gbq_report* report);

/* Header line of each CSV product: "diagnostics" (dim 1-3), "sweep", "decay",
 * "morawetz", "scattering". NULL for unknown kinds. */
GBQ_API const char* gbq_csv_header(const char* kind, int dim);

#ifdef __cplusplus
}
#endif

#endif
