/* C interface to the ISR library (libisr). All functions are thread-safe
 * except that one isr_cohort must not be closed while in use. Strings are
 * UTF-8; JSON arguments are passed as text. On failure a function returns a
 * nonzero status and isr_last_error() describes it (per thread). */
#ifndef ISR_ISR_H
#define ISR_ISR_H

#include <stddef.h>
#include <stdint.h>

#if defined(ISR_BUILDING_LIBRARY)
#define ISR_API __attribute__((visibility("default")))
#else
#define ISR_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum isr_status {
  ISR_OK = 0,
  ISR_ERR_INVALID = 1,
  ISR_ERR_CONFIG = 2,
  ISR_ERR_DATA = 3,
  ISR_ERR_PLUGIN = 4
} isr_status;

typedef struct isr_cohort isr_cohort;

ISR_API const char* isr_version(void);
ISR_API const char* isr_last_error(void);

/* Writes a synthetic cohort. config_json NULL selects the default fixture. */
ISR_API isr_status isr_synth(const char* config_json, const char* out_dir, int jobs);

/* Loads DIR or DIR/cohort.json. jobs caps worker threads for later calls. */
ISR_API isr_status isr_cohort_open(const char* path, int jobs, isr_cohort** out);
ISR_API void isr_cohort_close(isr_cohort* cohort);
ISR_API isr_status isr_cohort_session_count(const isr_cohort* cohort, size_t* out);
ISR_API isr_status isr_cohort_route_count(const isr_cohort* cohort, size_t* out);
/* Route id by index; the pointer stays valid while the cohort is open. */
ISR_API isr_status isr_cohort_route_id(const isr_cohort* cohort, size_t index, const char** out);

/* Similarity matrices of every section at `depth` (0 = top level) of one
 * route (route_id NULL = all routes), plus compare_log.csv, under out_dir. */
ISR_API isr_status isr_simmat(isr_cohort* cohort, const char* route_id, int depth,
                              const char* spec, const char* out_dir);

/* One k-fold evaluation. plugin_cmd may be NULL (ISR_PLUGIN_CMD is still
 * honoured). footprints_json may be NULL. */
ISR_API isr_status isr_evaluate(isr_cohort* cohort, const char* route_id, const char* params_json,
                                uint64_t seed, const char* plugin_cmd, const char* out_csv,
                                const char* footprints_json);

/* grid is "full" or "small". The plugin track is included when
 * include_plugin is nonzero. */
ISR_API isr_status isr_grid_size(const char* grid, int include_plugin, size_t* out);
/* Enumerates configurations without evaluating them. */
ISR_API isr_status isr_grid_list(const char* grid, int include_plugin, const char* out_csv);
/* Ranked grid search. The plugin track runs only when a plugin command is
 * configured (argument or ISR_PLUGIN_CMD). */
ISR_API isr_status isr_grid(isr_cohort* cohort, const char* route_id, const char* grid,
                            uint64_t seed, const char* plugin_cmd, const char* out_csv,
                            const char* footprints_json);

/* Benchmark corpus run. options_json may be NULL. Writes bench_ttc.csv,
 * bench_error.csv, compare_log.csv and bench_summary.json to out_dir. */
ISR_API isr_status isr_bench(const char* options_json, const char* out_dir);

/* Scores report footprints against the cohort's planted events. */
ISR_API isr_status isr_recover(const char* results_csv, const char* footprints_json,
                               const char* truth_json, const char* out_csv);

/* Cost between two frame-major series of 7 channels (n * 7 doubles). */
ISR_API isr_status isr_distance(const double* a, size_t a_frames, const double* b,
                                size_t b_frames, const char* spec, double* out);

#ifdef __cplusplus
}
#endif

#endif
