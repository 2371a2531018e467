/* C interface to the splitkit library. All objects are opaque handles owned
 * by the caller and released with the matching _free function. Every call
 * returns an sk_status; on failure sk_last_error() describes the problem for
 * the calling thread. */
#ifndef SPLITKIT_H
#define SPLITKIT_H

#include <stddef.h>
#include <stdint.h>

#if defined(SPLITKIT_BUILDING_LIBRARY)
#define SK_API __attribute__((visibility("default")))
#else
#define SK_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sk_status {
  SK_OK = 0,
  SK_E_INVALID_ARGUMENT = 1,
  SK_E_SHAPE = 2,
  SK_E_ZERO_DIAGONAL = 3,
  SK_E_PARSE = 4,
  SK_E_IO = 5,
  SK_E_CAP_EXCEEDED = 6,
  SK_E_DIVERGED = 7,
  SK_E_NOT_CONVERGED = 8,
  SK_E_INTERNAL = 9
} sk_status;

typedef struct sk_matrix sk_matrix;
typedef struct sk_vector sk_vector;
typedef struct sk_system sk_system;
typedef struct sk_splitting sk_splitting;
typedef struct sk_experiment sk_experiment;
typedef struct sk_sweep sk_sweep;

SK_API const char* sk_version(void);
SK_API const char* sk_last_error(void);
SK_API const char* sk_status_string(sk_status status);
/* Releases strings returned through char** out-parameters. */
SK_API void sk_string_free(char* s);

/* ---- dense matrices and vectors ---- */
SK_API sk_status sk_matrix_create(size_t rows, size_t cols, const double* row_major, sk_matrix** out);
SK_API sk_status sk_matrix_read(const char* path, sk_matrix** out);
SK_API sk_status sk_matrix_write(const sk_matrix* m, const char* path);
SK_API size_t sk_matrix_rows(const sk_matrix* m);
SK_API size_t sk_matrix_cols(const sk_matrix* m);
SK_API const double* sk_matrix_data(const sk_matrix* m);
SK_API void sk_matrix_free(sk_matrix* m);

SK_API sk_status sk_vector_create(size_t len, const double* data, sk_vector** out);
SK_API sk_status sk_vector_read(const char* path, sk_vector** out);
SK_API sk_status sk_vector_write(const sk_vector* v, const char* path);
SK_API size_t sk_vector_len(const sk_vector* v);
SK_API const double* sk_vector_data(const sk_vector* v);
SK_API void sk_vector_free(sk_vector* v);

/* ---- linear systems ---- */
typedef enum sk_matrix_class {
  SK_CLASS_1 = 1,
  SK_CLASS_2 = 2,
  SK_CLASS_3 = 3,
  SK_CLASS_BSPLINE = 4,
  SK_EXAMPLE_UNIT_RADIUS_3 = 5,
  SK_EXAMPLE_EXCHANGE_2 = 6
} sk_matrix_class;

typedef struct sk_generator_config {
  sk_matrix_class cls;
  size_t n;
  double phi;
  uint64_t seed;
} sk_generator_config;

SK_API sk_status sk_matrix_class_parse(const char* name, sk_matrix_class* out);
/* rhs may be NULL, in which case b = A 1. The system is normalized on
 * creation, so a zero diagonal is reported here. */
SK_API sk_status sk_system_create(const sk_matrix* a, const sk_vector* rhs, sk_system** out);
SK_API sk_status sk_system_generate(const sk_generator_config* cfg, sk_system** out);
SK_API size_t sk_system_size(const sk_system* s);
SK_API sk_status sk_system_matrix(const sk_system* s, sk_matrix** out);
SK_API sk_status sk_system_rhs(const sk_system* s, sk_vector** out);
SK_API sk_status sk_system_jacobi(const sk_system* s, sk_matrix** out);
SK_API void sk_system_free(sk_system* s);

/* ---- methods ---- */
typedef struct sk_method_spec {
  int method;           /* index into the method catalog */
  size_t block_split;   /* 0: default boundary for TC22 / TR22 */
  size_t amks_blocks;   /* 0: one selector per row */
} sk_method_spec;

SK_API size_t sk_method_count(void);
/* Catalog name of method index i (static storage). */
SK_API const char* sk_method_name(size_t i);
/* Case-insensitive; AMKS accepts ":k" for k contiguous row groups. */
SK_API sk_status sk_method_parse(const char* name, sk_method_spec* out);
SK_API sk_status sk_method_label(const sk_method_spec* spec, char** out);

/* ---- splittings ---- */
SK_API sk_status sk_splitting_build(const sk_system* s, const sk_method_spec* spec, sk_splitting** out);
SK_API sk_status sk_splitting_read(const sk_system* s, const char* path, sk_splitting** out);
SK_API sk_status sk_splitting_write(const sk_splitting* sp, const char* path);
SK_API size_t sk_splitting_order(const sk_splitting* sp);
/* Same source matrix and identical ordered parts. */
SK_API int sk_splitting_equal(const sk_splitting* a, const sk_splitting* b);
SK_API void sk_splitting_free(sk_splitting* sp);

typedef struct sk_order_properties {
  int essential;
  int maximal;
  int potentially_optimal;
} sk_order_properties;

typedef struct sk_refinement {
  int refines;
  int one_step;
  size_t coarse_shift;
  size_t fine_shift;
  size_t split_index;
  size_t chain_length;
} sk_refinement;

/* relative_zero: threshold factor for deciding that a product is zero
 * (0 for exact comparison). */
SK_API sk_status sk_splitting_properties(const sk_splitting* sp, double relative_zero, sk_order_properties* out);
SK_API sk_status sk_splitting_refines(const sk_splitting* fine, const sk_splitting* coarse, double relative_zero,
                                      sk_refinement* out);

/* ---- spectra ---- */
typedef enum sk_backend {
  SK_BACKEND_AUTO = 0,
  SK_BACKEND_DENSE = 1,
  SK_BACKEND_KRYLOV = 2,
  SK_BACKEND_POWER = 3
} sk_backend;

typedef struct sk_spectral_options {
  double tolerance;
  sk_backend backend;
  size_t dense_cap;
} sk_spectral_options;

typedef struct sk_spectral_result {
  double rho;
  char backend[16];
  size_t iterations;
  double residual_estimate;
  int converged;
  int nilpotent;
} sk_spectral_result;

SK_API void sk_spectral_options_default(sk_spectral_options* opts);
SK_API sk_status sk_method_spectral_radius(const sk_system* s, const sk_method_spec* spec,
                                           const sk_spectral_options* opts, sk_spectral_result* out);
SK_API sk_status sk_splitting_spectral_radius(const sk_splitting* sp, const sk_spectral_options* opts,
                                              sk_spectral_result* out);
SK_API sk_status sk_splitting_block_inf_norm(const sk_splitting* sp, double* out);

/* ---- solving ---- */
typedef enum sk_solve_mode { SK_MODE_GENERAL = 0, SK_MODE_TWO_STEP = 1, SK_MODE_MODIFIED_SGS = 2 } sk_solve_mode;

typedef struct sk_solve_config {
  double tolerance;
  size_t max_iters;
  sk_solve_mode mode;
} sk_solve_config;

typedef struct sk_solve_result {
  size_t iterations;
  double final_residual;
  int converged;
  int diverged;
} sk_solve_result;

SK_API void sk_solve_config_default(sk_solve_config* cfg);
SK_API sk_status sk_solve_mode_parse(const char* name, sk_solve_mode* out);
/* Returns SK_OK when converged, SK_E_DIVERGED or SK_E_NOT_CONVERGED
 * otherwise; result and solution are filled in every case where the
 * iteration ran. solution may be NULL. */
SK_API sk_status sk_solve(const sk_system* s, const sk_method_spec* spec, const sk_solve_config* cfg,
                          sk_solve_result* result, sk_vector** solution);

/* ---- experiments ---- */
typedef struct sk_experiment_config {
  sk_matrix_class cls;
  size_t n;
  double phi;
  size_t trials;
  uint64_t seed;
  size_t threads; /* 0: automatic, capped by SPLITKIT_THREADS */
} sk_experiment_config;

typedef struct sk_experiment_row {
  double mean_rho;
  double sd_rho;
  double mean_speedup;
  double sd_speedup;
  size_t count;
  size_t speedup_excluded;
  size_t failures;
} sk_experiment_row;

/* methods == NULL selects the standard table set. */
SK_API sk_status sk_experiment_run(const sk_experiment_config* cfg, const sk_method_spec* methods, size_t count,
                                   sk_experiment** out);
SK_API size_t sk_experiment_rows(const sk_experiment* e);
SK_API sk_status sk_experiment_row_get(const sk_experiment* e, size_t i, sk_experiment_row* out);
SK_API sk_status sk_experiment_csv(const sk_experiment* e, char** out);
SK_API sk_status sk_experiment_table(const sk_experiment* e, char** out);
SK_API void sk_experiment_free(sk_experiment* e);

typedef struct sk_sweep_config {
  sk_matrix_class cls;
  size_t n;
  uint64_t seed;
  double phi_start;
  double phi_stop;
  double phi_step;
  size_t threads;
} sk_sweep_config;

SK_API sk_status sk_sweep_run(const sk_sweep_config* cfg, const sk_method_spec* methods, size_t count,
                              sk_sweep** out);
SK_API sk_status sk_sweep_csv(const sk_sweep* s, char** out);
SK_API void sk_sweep_free(sk_sweep* s);

/* ---- reference comparisons ---- */
typedef struct sk_reproduce_options {
  const char* table_dir; /* NULL: built-in default location */
  size_t n;
  size_t trials;
  uint64_t seed;
  size_t threads;
} sk_reproduce_options;

SK_API size_t sk_reproduce_target_count(void);
SK_API const char* sk_reproduce_target(size_t i);
SK_API const char* sk_default_table_dir(void);
/* pass is set to 1 when every binding comparison holds. */
SK_API sk_status sk_reproduce(const char* target, const sk_reproduce_options* opts, int* pass, char** report,
                              char** csv);

#ifdef __cplusplus
}
#endif

#endif /* SPLITKIT_H */
