/*
 * Copyright 2026 The BELT Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface to libbelt: completion of a low-rank symmetric matrix from
 * several noisy principal submatrices, the SMC and zero-fill baselines,
 * the simulation drivers and embedding translation.
 *
 * Objects are opaque handles created by *_create / *_load / belt_complete /
 * belt_simulate and released by the matching *_destroy. Every function that
 * can fail returns a belt_status; on failure belt_last_error() describes the
 * problem. The message is thread-local and valid until the next failing call
 * on the same thread.
 */

#ifndef BELT_BELT_H_
#define BELT_BELT_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(BELT_BUILDING_LIBRARY)
#define BELT_API __declspec(dllexport)
#else
#define BELT_API __declspec(dllimport)
#endif
#else
#define BELT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum belt_status {
  BELT_OK = 0,
  BELT_ERROR_VALIDATION = 1,
  BELT_ERROR_PRECONDITION = 2,
  BELT_ERROR_NUMERICAL = 3,
  BELT_ERROR_COMPLETION = 4,
  BELT_ERROR_GENERATION = 5,
  BELT_ERROR_PARSE = 6,
  BELT_ERROR_IO = 7,
  BELT_ERROR_NULL_ARGUMENT = 8,
  BELT_ERROR_NOT_FOUND = 9,
  BELT_ERROR_INTERNAL = 10
} belt_status;

typedef enum belt_method {
  BELT_METHOD_BELT = 0,
  BELT_METHOD_SMC = 1,
  BELT_METHOD_PRETRAIN = 2
} belt_method;

BELT_API const char* belt_version(void);
BELT_API const char* belt_last_error(void);
BELT_API const char* belt_status_name(belt_status status);

BELT_API const char* belt_method_name(belt_method method);
BELT_API belt_status belt_method_parse(const char* name, belt_method* out);

/* Warnings (singular alignment input, skipped rows, redrawn samples). A NULL
 * callback restores the default, which prints to stderr. */
typedef void (*belt_warning_fn)(const char* message, void* user_data);
BELT_API void belt_set_warning_callback(belt_warning_fn callback,
                                        void* user_data);

/* ---- Problems ----------------------------------------------------------
 * A problem is a list of sources. Sources are either dense (numeric entity
 * ids chosen by the caller) or loaded from triplet/vocabulary files (entity
 * ids assigned from tokens); the two kinds cannot be mixed. */
typedef struct belt_problem belt_problem;

BELT_API belt_status belt_problem_create(belt_problem** out);
BELT_API void belt_problem_destroy(belt_problem* problem);

/* `indices` strictly increasing; `values` is count x count, row-major,
 * symmetric. */
BELT_API belt_status belt_problem_add_dense(belt_problem* problem,
                                            const char* label,
                                            const int64_t* indices,
                                            size_t count,
                                            const double* values);
BELT_API belt_status belt_problem_add_files(belt_problem* problem,
                                            const char* triplet_path,
                                            const char* vocab_path);
/* Token pairs (token of source a, token of source b) naming one entity.
 * Sources are numbered from 1 in the order they were added. */
BELT_API belt_status belt_problem_add_dictionary(belt_problem* problem,
                                                 int source_a, int source_b,
                                                 const char* path);
BELT_API size_t belt_problem_source_count(const belt_problem* problem);
/* Smallest rank at which some overlap block reaches `threshold` of its
 * eigenvalue mass. */
BELT_API belt_status belt_problem_select_rank(belt_problem* problem,
                                              double threshold, int* rank);

/* ---- Completion ------------------------------------------------------- */
typedef struct belt_completion_options {
  belt_method method;
  int rank;
  int threads; /* 0 = one per hardware thread */
  /* Threshold the rank was selected with, recorded in report.json when
   * positive. */
  double rank_threshold;
} belt_completion_options;

BELT_API void belt_completion_options_init(belt_completion_options* options);

typedef struct belt_result belt_result;

BELT_API belt_status belt_complete(belt_problem* problem,
                                   const belt_completion_options* options,
                                   belt_result** out);
BELT_API void belt_result_destroy(belt_result* result);

BELT_API size_t belt_result_dimension(const belt_result* result);
BELT_API int belt_result_rank(const belt_result* result);
BELT_API size_t belt_result_source_count(const belt_result* result);
/* Entity id of each row (n values). */
BELT_API belt_status belt_result_entities(const belt_result* result,
                                          int64_t* out);
/* Rank-r estimate, n x n row-major. */
BELT_API belt_status belt_result_low_rank(const belt_result* result,
                                          double* out);
/* Imputed matrix before the rank-r step, n x n row-major. */
BELT_API belt_status belt_result_imputed(const belt_result* result,
                                         double* out);
/* n x r row-major. */
BELT_API belt_status belt_result_embeddings(const belt_result* result,
                                            double* out);
/* r eigenvalues, descending. */
BELT_API belt_status belt_result_eigenvalues(const belt_result* result,
                                             double* out);
/* One noise estimate per source. */
BELT_API belt_status belt_result_noise(const belt_result* result,
                                       double* out);
/* Writes completed.tsv, embeddings.tsv and report.json into `directory`
 * (created if missing). */
BELT_API belt_status belt_result_write(const belt_result* result,
                                       const char* directory);

/* ---- Simulation -------------------------------------------------------- */
typedef enum belt_sigma_rule {
  BELT_SIGMA_SCALED = 0,  /* sigma_s = s * sigma */
  BELT_SIGMA_CONSTANT = 1 /* sigma_s = sigma */
} belt_sigma_rule;

typedef struct belt_sim_config {
  int setting; /* 1, 2 or 3 */
  int64_t n;
  int rank;
  int m;
  double p0;
  double sigma;
  belt_sigma_rule sigma_rule;
  int n_test;
  uint64_t seed;
  int replicates;
  int require_overlap;
  int threads; /* 0 = one per hardware thread */
} belt_sim_config;

/* Defaults of a setting at desk scale (N = 2000, r = 20). */
BELT_API belt_status belt_sim_config_init(belt_sim_config* config,
                                          int setting);

typedef struct belt_metric_table belt_metric_table;

typedef struct belt_metric_row {
  int setting;
  belt_method method;
  int64_t n;
  int rank;
  int m;
  double p0;
  double sigma;
  int replicate;
  uint64_t seed;
  int ok;
  double err_f;
  double err_2;
  /* NaN outside setting 3 or for failed rows. */
  double precision_at_1;
  double precision_at_5;
  double precision_at_10;
  double precision_at_20;
  double wall_ms;
} belt_metric_row;

/* One row per (replicate, method), in that order. Estimator failures are
 * recorded per row; BELT_ERROR_* is returned only for invalid input. */
BELT_API belt_status belt_simulate(const belt_sim_config* config,
                                   const belt_method* methods,
                                   size_t method_count,
                                   belt_metric_table** out);
BELT_API void belt_metric_table_destroy(belt_metric_table* table);
BELT_API size_t belt_metric_table_size(const belt_metric_table* table);
BELT_API size_t belt_metric_table_failures(const belt_metric_table* table);
BELT_API belt_status belt_metric_table_row(const belt_metric_table* table,
                                           size_t index,
                                           belt_metric_row* out);
/* Failure message of a row, or "" for successful rows. */
BELT_API const char* belt_metric_table_row_error(
    const belt_metric_table* table, size_t index);
/* metrics CSV; wall_ms is left empty unless include_timing is nonzero. */
BELT_API belt_status belt_metric_table_write_csv(
    const belt_metric_table* table, const char* path, int include_timing);

/* ---- Embeddings and translation --------------------------------------- */
typedef struct belt_embeddings belt_embeddings;

BELT_API belt_status belt_embeddings_load(const char* path,
                                          belt_embeddings** out);
BELT_API void belt_embeddings_destroy(belt_embeddings* table);
BELT_API size_t belt_embeddings_count(const belt_embeddings* table);
BELT_API size_t belt_embeddings_dimension(const belt_embeddings* table);
BELT_API const char* belt_embeddings_token(const belt_embeddings* table,
                                           size_t row);
/* BELT_ERROR_NOT_FOUND for unknown tokens. */
BELT_API belt_status belt_embeddings_find(const belt_embeddings* table,
                                          const char* token, size_t* row);

typedef struct belt_match {
  size_t row;
  double cosine;
} belt_match;

/* Ranks `candidates` by cosine similarity to `query` (descending, ties by
 * ascending row) and writes at most k matches with cosine >= threshold to
 * `out` (capacity k). */
BELT_API belt_status belt_translate(const belt_embeddings* table,
                                    size_t query, const size_t* candidates,
                                    size_t candidate_count, size_t k,
                                    double threshold, belt_match* out,
                                    size_t* out_count);

#ifdef __cplusplus
}
#endif

#endif /* BELT_BELT_H_ */
