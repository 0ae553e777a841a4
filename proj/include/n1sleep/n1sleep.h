/*
 * n1sleep C API: single-subject sleep event mining.
 *
 * Objects are opaque handles created by the library and released with the matching
 * *_free function. Every fallible call returns an n1_status; on failure the
 * calling thread's n1_last_error() holds a human-readable message. Strings returned
 * through char** out-parameters are heap-allocated and released with n1_string_free.
 */
#ifndef N1SLEEP_H
#define N1SLEEP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(N1SLEEP_BUILDING)
#    define N1_API __declspec(dllexport)
#  else
#    define N1_API __declspec(dllimport)
#  endif
#else
#  define N1_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum n1_status {
  N1_OK = 0,
  N1_ERR_FILE = 1,
  N1_ERR_PARSE = 2,
  N1_ERR_OVERLAP = 3,
  N1_ERR_DUPLICATE_DATE = 4,
  N1_ERR_DOMAIN = 5,
  N1_ERR_INSUFFICIENT_DATA = 6,
  N1_ERR_SPEC = 7,
  N1_ERR_UNKNOWN_NAME = 8,
  N1_ERR_BASE_CATEGORY = 9,
  N1_ERR_EMPTY_MATRIX = 10,
  N1_ERR_MIXED_MEASURES = 11,
  N1_ERR_INVALID_ARGUMENT = 12,
  N1_ERR_NO_FEATURE_ROWS = 13,
  N1_ERR_INTERNAL = 99
} n1_status;

typedef struct n1_records n1_records;
typedef struct n1_schemes n1_schemes;
typedef struct n1_analysis n1_analysis;

N1_API const char* n1_version(void);
N1_API const char* n1_status_name(n1_status status);
/* Message for the last failed call on this thread; "" when none. */
N1_API const char* n1_last_error(void);
N1_API void n1_string_free(char* s);

/* ---- ingestion ---------------------------------------------------------- */

typedef struct n1_merge_policy {
  double env_window_min;  /* default 30 */
  double meal_lookback_h; /* default 24 */
  int week_window_days;   /* default 7 */
} n1_merge_policy;

N1_API void n1_merge_policy_default(n1_merge_policy* policy);

typedef struct n1_ingest_stats {
  size_t sleep_rows;
  size_t activity_rows;
  size_t environment_rows;
  size_t meal_rows;
  size_t merged_records;
  size_t kept_records;
} n1_ingest_stats;

/* Parses the four source files, merges them and keeps consecutive runs of at least
 * min_run nights. policy and stats may be NULL. */
N1_API n1_status n1_ingest(const char* sleep_path, const char* activity_path, const char* env_path,
                           const char* meals_path, const n1_merge_policy* policy, int min_run,
                           n1_records** out, n1_ingest_stats* stats);

N1_API n1_status n1_records_read(const char* path, n1_records** out);
N1_API n1_status n1_records_parse(const char* text, size_t len, n1_records** out);
N1_API n1_status n1_records_write(const n1_records* records, const char* path);
/* dayrecords.csv text; release with n1_string_free. */
N1_API n1_status n1_records_to_csv(const n1_records* records, char** out);
N1_API size_t n1_records_count(const n1_records* records);
N1_API void n1_records_free(n1_records* records);

/* ---- schemes ------------------------------------------------------------ */

N1_API n1_status n1_schemes_default(n1_schemes** out);
N1_API n1_status n1_schemes_load(const char* path, n1_schemes** out);
N1_API void n1_schemes_free(n1_schemes* schemes);
/* Writes the category label (NUL-terminated, truncated to buf_len) for value. */
N1_API n1_status n1_categorize(const n1_schemes* schemes, const char* scheme_name, double value, char* buf,
                               size_t buf_len);

/* ---- synthetic data ----------------------------------------------------- */

/* spec_path may be NULL for the built-in null spec; seed/n_days override the spec
 * when non-NULL. */
N1_API n1_status n1_synth(const char* spec_path, const uint64_t* seed, const int* n_days, n1_records** out);

/* ---- statistics --------------------------------------------------------- */

typedef struct n1_test_result {
  double t;
  double df;
  double p;
  double mean_a;
  double mean_b;
  double mean_diff;
  size_t n_a;
  size_t n_b;
  int degenerate_variance;
} n1_test_result;

N1_API n1_status n1_welch_t(const double* a, size_t n_a, const double* b, size_t n_b, n1_test_result* out);
N1_API n1_status n1_student_t_cdf(double t, double df, double* out);
N1_API n1_status n1_reg_inc_beta(double x, double a, double b, double* out);

/* ---- analysis ----------------------------------------------------------- */

typedef struct n1_analyze_options {
  double alpha;     /* default 0.05 */
  size_t min_n;     /* default 3 */
  unsigned threads; /* default 1 */
} n1_analyze_options;

N1_API void n1_analyze_options_default(n1_analyze_options* options);

/* Derives feature rows and runs both sweeps. schemes and options may be NULL for
 * defaults. Returns N1_ERR_NO_FEATURE_ROWS when no night has a preceding night. */
N1_API n1_status n1_analyze(const n1_records* records, const n1_schemes* schemes, const n1_analyze_options* options,
                            n1_analysis** out);
N1_API size_t n1_analysis_feature_rows(const n1_analysis* analysis);
N1_API size_t n1_analysis_screening_count(const n1_analysis* analysis);
N1_API size_t n1_analysis_effect_count(const n1_analysis* analysis);
/* Screening cells with p < alpha across all rules. */
N1_API size_t n1_analysis_significant_cells(const n1_analysis* analysis);
N1_API n1_status n1_analysis_write_reports(const n1_analysis* analysis, const char* out_dir);
N1_API void n1_analysis_free(n1_analysis* analysis);

#ifdef __cplusplus
}
#endif

#endif /* N1SLEEP_H */
