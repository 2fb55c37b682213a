/*
 * unicomp C API.
 *
 * Objects are opaque handles created by the library and released with the
 * matching *_free function. Every fallible call returns a unicomp_status;
 * on failure, unicomp_last_error() holds a message for the calling thread.
 * Strings returned through char** out-parameters are owned by the caller
 * and must be released with unicomp_string_free().
 */
#ifndef UNICOMP_H
#define UNICOMP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(UNICOMP_BUILDING_LIBRARY)
#    define UNICOMP_API __declspec(dllexport)
#  else
#    define UNICOMP_API __declspec(dllimport)
#  endif
#else
#  define UNICOMP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum unicomp_status {
  UNICOMP_OK = 0,
  UNICOMP_ERR_INVALID_ARGUMENT = 1,
  UNICOMP_ERR_PARSE = 2,
  UNICOMP_ERR_IO = 3,
  UNICOMP_ERR_DIMENSION_MISMATCH = 4,
  UNICOMP_ERR_NON_FINITE = 5,
  UNICOMP_ERR_RANK_DEFICIENT = 6,
  UNICOMP_ERR_NUMERICAL_FAILURE = 7,
  UNICOMP_ERR_DEGENERATE_PATTERN = 8,
  UNICOMP_ERR_NOT_RANK1_CONSISTENT = 9,
  UNICOMP_ERR_ZERO_ENTRY = 10,
  UNICOMP_ERR_UNDERDETERMINED = 11,
  UNICOMP_ERR_SIGN_INCONSISTENT = 12,
  UNICOMP_ERR_SEPARATION = 13,
  UNICOMP_ERR_DEGENERATE_BRACKET = 14,
  UNICOMP_ERR_COLLINEAR_DESIGN = 15,
  UNICOMP_ERR_INTERNAL = 99
} unicomp_status;

typedef enum unicomp_kind { UNICOMP_KIND_GRAM = 0, UNICOMP_KIND_RECT = 1 } unicomp_kind;

typedef enum unicomp_test { UNICOMP_TEST_LOCAL = 0, UNICOMP_TEST_GLOBAL = 1 } unicomp_test;

#define UNICOMP_FLAG_COUNT_SHORTFALL 0x1u
#define UNICOMP_FLAG_RESIDUAL_FLOOR 0x2u
#define UNICOMP_FLAG_STRESS_VACUOUS 0x4u

typedef struct unicomp_pattern unicomp_pattern;
typedef struct unicomp_verdict unicomp_verdict;

typedef struct unicomp_test_config {
  double epsilon;          /* default 1e-4 */
  double lsqr_iter_factor; /* LSQR cap = factor * (rows + cols); default 10 */
  size_t repeats;          /* independent probes; default 1 */
  uint64_t seed;
} unicomp_test_config;

typedef struct unicomp_harness_config {
  unicomp_test_config test; /* test.seed seeds the whole run */
  double descent_factor;    /* default 0.95 */
  size_t consecutive_failures; /* default 20 */
  size_t refine_samples;    /* default 40 */
  double alpha_cap;         /* default 1e4 */
  size_t jobs;              /* concurrent trials; default 1 */
} unicomp_harness_config;

UNICOMP_API const char* unicomp_version(void);
UNICOMP_API const char* unicomp_status_name(unicomp_status status);
UNICOMP_API const char* unicomp_last_error(void);
UNICOMP_API void unicomp_string_free(char* s);

UNICOMP_API void unicomp_test_config_init(unicomp_test_config* cfg);
UNICOMP_API void unicomp_harness_config_init(unicomp_harness_config* cfg);

/* Patterns. For UNICOMP_KIND_GRAM n2 is ignored. */
UNICOMP_API unicomp_status unicomp_pattern_sample(unicomp_kind kind, size_t n1, size_t n2,
                                                  double beta, uint64_t seed,
                                                  unicomp_pattern** out);
UNICOMP_API unicomp_status unicomp_pattern_parse(const char* text, unicomp_pattern** out);
UNICOMP_API unicomp_status unicomp_pattern_read(const char* path, unicomp_pattern** out);
UNICOMP_API unicomp_status unicomp_pattern_format(const unicomp_pattern* p, char** out_text);
UNICOMP_API unicomp_status unicomp_pattern_info(const unicomp_pattern* p, unicomp_kind* kind,
                                                size_t* n1, size_t* n2, size_t* m);
UNICOMP_API void unicomp_pattern_free(unicomp_pattern* p);

/* Randomized completability tests. cfg may be NULL for defaults. */
UNICOMP_API unicomp_status unicomp_check(const unicomp_pattern* p, unicomp_test test, size_t d,
                                         const unicomp_test_config* cfg, unicomp_verdict** out);
UNICOMP_API int unicomp_verdict_completable(const unicomp_verdict* v);
UNICOMP_API unsigned unicomp_verdict_flags(const unicomp_verdict* v);
UNICOMP_API double unicomp_verdict_residual(const unicomp_verdict* v);
UNICOMP_API unicomp_status unicomp_verdict_json(const unicomp_verdict* v, char** out_json);
UNICOMP_API void unicomp_verdict_free(unicomp_verdict* v);

/* Rank-1 combinatorics. locally/globally may be NULL. */
UNICOMP_API unicomp_status unicomp_rank1_check(const unicomp_pattern* p, int* locally,
                                               int* globally, char** out_json);
/* values_text: lines "i j value" (1-based). Gram patterns only. */
UNICOMP_API unicomp_status unicomp_rank1_complete(const unicomp_pattern* p,
                                                  const char* values_text, char** out_json);

/* Threshold experiments. Rectangular runs use n1 = n2 = n. */
UNICOMP_API unicomp_status unicomp_threshold_sweep(unicomp_kind kind, unicomp_test test, size_t d,
                                                   const size_t* n_list, size_t count,
                                                   const unicomp_harness_config* cfg,
                                                   char** out_csv);
/* Fits log beta* = a1 log n + a2 log log n + a3 to the rows of a sweep CSV. */
UNICOMP_API unicomp_status unicomp_fit_scaling(const char* sweep_csv, int fix_a2,
                                               char** out_json);
/* beta_star <= 0 estimates it per size; multipliers may be NULL for defaults. */
UNICOMP_API unicomp_status unicomp_bench(unicomp_kind kind, unicomp_test test, size_t d,
                                         const size_t* sizes, size_t count, double beta_star,
                                         const double* multipliers, size_t multiplier_count,
                                         const unicomp_harness_config* cfg, char** out_csv);

#ifdef __cplusplus
}
#endif

#endif /* UNICOMP_H */
