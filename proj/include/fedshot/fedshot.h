/* C interface to the fedshot one-shot federated learning library.
 *
 * All entry points are thread-safe. Calls that can fail return a
 * fedshot_status; on failure, fedshot_last_error() returns a message for the
 * calling thread. Handles are opaque and must be released with the matching
 * _free function.
 */
#ifndef FEDSHOT_H
#define FEDSHOT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define FEDSHOT_API __declspec(dllexport)
#else
#define FEDSHOT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fedshot_status {
  FEDSHOT_OK = 0,
  FEDSHOT_ERR_CONFIG = 1,  /* bad configuration or input schema */
  FEDSHOT_ERR_RUNTIME = 2  /* everything else */
} fedshot_status;

typedef struct fedshot_config fedshot_config;
typedef struct fedshot_report fedshot_report;

FEDSHOT_API const char* fedshot_version(void);

/* Message for the last failing call on this thread; empty string if none. */
FEDSHOT_API const char* fedshot_last_error(void);

/* Configuration: flat key = value text files. */
FEDSHOT_API fedshot_status fedshot_config_load(const char* path,
                                               fedshot_config** out);
FEDSHOT_API fedshot_status fedshot_config_default(fedshot_config** out);
FEDSHOT_API fedshot_status fedshot_config_validate_file(const char* path);
FEDSHOT_API fedshot_status fedshot_config_set_seed(fedshot_config* config,
                                                   uint64_t seed);
FEDSHOT_API void fedshot_config_free(fedshot_config* config);

/* Runs the full experiment described by the configuration. */
FEDSHOT_API fedshot_status fedshot_run(const fedshot_config* config,
                                       fedshot_report** out);

/* Writes report.json, summary.csv, device_scores.csv and distill_curve.csv
 * into out_dir (created if missing). */
FEDSHOT_API fedshot_status fedshot_report_emit(const fedshot_report* report,
                                               const char* out_dir);

/* Method entries in report order ("local", "ideal", then policy entries). */
FEDSHOT_API size_t fedshot_report_method_count(const fedshot_report* report);
FEDSHOT_API const char* fedshot_report_method_name(const fedshot_report* report,
                                                   size_t index);
/* Mean device AUC of a method entry; fails for a failed policy entry. */
FEDSHOT_API fedshot_status fedshot_report_method_mean_auc(
    const fedshot_report* report, size_t index, double* out);
FEDSHOT_API const char* fedshot_report_best_method(const fedshot_report* report);
FEDSHOT_API double fedshot_report_wall_seconds(const fedshot_report* report);
FEDSHOT_API void fedshot_report_free(fedshot_report* report);

/* Generates a synthetic federated dataset and exports it as CSV. */
FEDSHOT_API fedshot_status fedshot_synth_export(uint32_t devices, uint32_t dim,
                                                double heterogeneity,
                                                uint32_t n_min, uint32_t n_max,
                                                uint64_t seed,
                                                const char* csv_path);

#ifdef __cplusplus
}
#endif

#endif /* FEDSHOT_H */
