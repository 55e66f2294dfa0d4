#ifndef MMHM_H
#define MMHM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MMHM_API __declspec(dllexport)
#else
#define MMHM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mmhm_status {
    MMHM_OK = 0,
    MMHM_ERR_CONFIG = 1,
    MMHM_ERR_DATA = 2,
    MMHM_ERR_INVARIANT = 3,
    MMHM_ERR_ANALYSIS = 4,
    MMHM_ERR_IO = 5,
    MMHM_ERR_INTERNAL = 6
} mmhm_status;

typedef enum mmhm_zscore {
    MMHM_ZSCORE_DEFAULT = -1, /* take the mode from the manifest */
    MMHM_ZSCORE_CAUSAL = 0,
    MMHM_ZSCORE_RETRO = 1
} mmhm_zscore;

/* Message of the last failed call on this thread, "" if none. */
MMHM_API const char* mmhm_last_error(void);
MMHM_API const char* mmhm_version(void);
/* Releases strings returned through char** out-parameters. */
MMHM_API void mmhm_free_string(char* s);

typedef struct mmhm_config {
    uint32_t k;
    double p;
    /* d_beta0, d_beta1, d_beta2, churn, fragility, footprint; must sum to 1 */
    double weights[6];
    double alpha;
    int64_t r_cap; /* <= 0: derived from the first graph */
    size_t cycle_sample_cap;
    int zscore; /* MMHM_ZSCORE_CAUSAL or MMHM_ZSCORE_RETRO */
    double recompression_threshold;
    uint32_t recompression_patience;
    int verify;
    unsigned threads;
} mmhm_config;

MMHM_API void mmhm_config_default(mmhm_config* config);

typedef struct mmhm_epoch {
    uint32_t epoch;
    int64_t betti[3];
    int64_t delta_betti[3];
    double churn;
    int64_t fragility;
    double footprint_per_dim[3]; /* d = 1..3 */
    double footprint;
    size_t mover_count;
    size_t touched[3]; /* |T_d|, d = 1..3 */
    size_t simplices[4];
    size_t column_ops;
    int recompressed;
    double isoscore;
    double ci_raw; /* causal values */
    double ci_ema;
} mmhm_epoch;

typedef struct mmhm_monitor mmhm_monitor;

MMHM_API mmhm_status mmhm_monitor_create(const mmhm_config* config, mmhm_monitor** out);
MMHM_API void mmhm_monitor_destroy(mmhm_monitor* monitor);
/* Feeds one row-major rows x cols snapshot; epochs are numbered from 0. */
MMHM_API mmhm_status mmhm_monitor_push(mmhm_monitor* monitor, const double* values, size_t rows, size_t cols,
                                       mmhm_epoch* out);

/* IsoScore of a row-major point cloud (cols >= 2). */
MMHM_API mmhm_status mmhm_isoscore(const double* values, size_t rows, size_t cols, double* out);

/* Runs a manifest and writes metrics.csv, metrics.json and monitor.log.
 * out_dir may be NULL (manifest directory). */
MMHM_API mmhm_status mmhm_run_monitor(const char* manifest_path, int verify, int zscore, const char* out_dir,
                                      unsigned threads);

typedef struct mmhm_synth_spec {
    const char* kind; /* jitter, dimensional_collapse, complete_collapse, fragmentation */
    size_t n;
    size_t d;
    uint32_t epochs;
    uint64_t seed;
    uint32_t onset;
    double severity;
    uint32_t metric_lag;
    double noise;
} mmhm_synth_spec;

MMHM_API void mmhm_synth_default(mmhm_synth_spec* spec);
/* Writes epoch_NNNN.snap files and manifest.json into out_dir. */
MMHM_API mmhm_status mmhm_synth(const mmhm_synth_spec* spec, const char* out_dir);

/* Writes analysis.json and lags.csv (plus sweep files when sweep != 0).
 * *json_out receives the summary unless json_out is NULL. */
MMHM_API mmhm_status mmhm_analyze(const char* run_dir, const char* metric, int max_lag, int sweep,
                                  unsigned threads, char** json_out);

/* format: "csv" or "json". */
MMHM_API mmhm_status mmhm_report(const char* run_dir, const char* format, char** out);

#ifdef __cplusplus
}
#endif

#endif /* MMHM_H */
