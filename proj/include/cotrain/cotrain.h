/*
 * Copyright 2026 The cotrainlab Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the cotrainlab core. Every function returns a status code;
 * on failure cotrain_last_error() describes the problem for the calling
 * thread until the next call into the library. Handles are opaque and must be
 * released with the matching *_free function. */
#ifndef COTRAIN_COTRAIN_H_
#define COTRAIN_COTRAIN_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(COTRAIN_BUILDING_LIBRARY)
#    define COTRAIN_API __declspec(dllexport)
#  else
#    define COTRAIN_API __declspec(dllimport)
#  endif
#else
#  define COTRAIN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cotrain_status {
  COTRAIN_OK = 0,
  COTRAIN_ERR_INVALID_ARGUMENT = 1,
  COTRAIN_ERR_IO = 2,
  COTRAIN_ERR_CONFIG = 3,
  COTRAIN_ERR_NUMERIC = 4,
  COTRAIN_ERR_AUDIT_FAILED = 5,
  COTRAIN_ERR_INTERNAL = 99
} cotrain_status;

typedef enum cotrain_partition {
  COTRAIN_LABELED = 0,
  COTRAIN_UNLABELED = 1,
  COTRAIN_TEST = 2
} cotrain_partition;

typedef struct cotrain_dataset cotrain_dataset;
typedef struct cotrain_classifier cotrain_classifier;
typedef struct cotrain_run cotrain_run;

COTRAIN_API const char* cotrain_version(void);
COTRAIN_API const char* cotrain_last_error(void);
COTRAIN_API const char* cotrain_status_name(cotrain_status status);

/* ---- data ---------------------------------------------------------------- */

typedef struct cotrain_generator_config {
  size_t dim_view1;
  size_t dim_view2;
  double class_separation;
  double noise_sigma;
  double rho;
  size_t latent_dim;
  size_t n_labeled;
  size_t n_unlabeled;
  size_t n_test;
  double class_balance;
  double shift_magnitude; /* recorded only; use cotrain_dataset_shift */
  uint64_t seed;
} cotrain_generator_config;

COTRAIN_API void cotrain_generator_config_default(cotrain_generator_config* cfg);

COTRAIN_API cotrain_status cotrain_dataset_generate(const cotrain_generator_config* cfg,
                                                    cotrain_dataset** out);
COTRAIN_API cotrain_status cotrain_dataset_load(const char* dataset_csv, const char* oracle_csv,
                                                cotrain_dataset** out);
COTRAIN_API cotrain_status cotrain_dataset_save(const cotrain_dataset* ds, const char* dataset_csv,
                                                const char* oracle_csv);
/* Returns a shifted copy; the input is left unchanged. */
COTRAIN_API cotrain_status cotrain_dataset_shift(const cotrain_dataset* ds, double magnitude,
                                                 uint64_t seed, int shift_unlabeled,
                                                 cotrain_dataset** out);
COTRAIN_API cotrain_status cotrain_dataset_sizes(const cotrain_dataset* ds, size_t* n_labeled,
                                                 size_t* n_unlabeled, size_t* n_test,
                                                 size_t* dim_view1, size_t* dim_view2);
/* Copies the features of one instance. *dim receives the view dimension. */
COTRAIN_API cotrain_status cotrain_dataset_features(const cotrain_dataset* ds,
                                                    cotrain_partition part, size_t index,
                                                    int view, double* buffer, size_t capacity,
                                                    size_t* dim);
COTRAIN_API cotrain_status cotrain_dataset_dependence(const cotrain_dataset* ds, double* stat,
                                                      double* indep);
COTRAIN_API void cotrain_dataset_free(cotrain_dataset* ds);

/* ---- classifier ---------------------------------------------------------- */

typedef struct cotrain_train_config {
  double learning_rate;
  size_t epochs;
  double l2_penalty;
  double lambda_agree;
  double prob_clip;
  uint64_t seed;
} cotrain_train_config;

COTRAIN_API void cotrain_train_config_default(cotrain_train_config* cfg);

/* weights holds dim coefficients followed by the bias. */
COTRAIN_API cotrain_status cotrain_classifier_create(int view, const double* weights,
                                                     size_t n_weights, double prob_clip,
                                                     cotrain_classifier** out);
COTRAIN_API cotrain_status cotrain_classifier_train(const cotrain_dataset* ds, int view,
                                                    const cotrain_train_config* cfg,
                                                    cotrain_classifier** out);
COTRAIN_API cotrain_status cotrain_classifier_predict(const cotrain_classifier* clf,
                                                      const double* x, size_t dim,
                                                      double* prob_positive, int* label);
COTRAIN_API cotrain_status cotrain_classifier_error(const cotrain_classifier* clf,
                                                    const cotrain_dataset* ds,
                                                    cotrain_partition part, double* error);
COTRAIN_API cotrain_status cotrain_classifier_weights(const cotrain_classifier* clf,
                                                      double* buffer, size_t capacity,
                                                      size_t* n_weights);
COTRAIN_API cotrain_status cotrain_classifier_save(const cotrain_classifier* clf,
                                                   const char* path);
COTRAIN_API cotrain_status cotrain_classifier_load(const char* path, cotrain_classifier** out);
COTRAIN_API void cotrain_classifier_free(cotrain_classifier* clf);

/* ---- co-training --------------------------------------------------------- */

typedef struct cotrain_cotrain_config {
  size_t rounds;
  double tau_pseudo;
  double tau_agree;
  size_t k_pseudo;
  double lambda_agree;
  int accumulate_pseudo;
  double delta0;
  uint64_t seed;
  cotrain_train_config train; /* seed and lambda_agree are taken from above */
} cotrain_cotrain_config;

typedef struct cotrain_round_metrics {
  int round;
  double err_view1;
  double err_view2;
  double err_max;
  double disagreement;
  size_t pool_size;
  size_t added_view1;
  size_t added_view2;
  double pseudo_accuracy; /* NaN when nothing was added */
} cotrain_round_metrics;

typedef struct cotrain_lemma_report {
  double eps1_before;
  double eps2;
  double eps1_after;
  int improved;
  int precondition_violated;
  size_t pseudo_labels;
  double pseudo_accuracy;
} cotrain_lemma_report;

COTRAIN_API void cotrain_cotrain_config_default(cotrain_cotrain_config* cfg);

COTRAIN_API cotrain_status cotrain_run_cotraining(const cotrain_dataset* ds,
                                                  const cotrain_cotrain_config* cfg,
                                                  cotrain_run** out);
/* Number of trajectory rows, including round 0. */
COTRAIN_API cotrain_status cotrain_run_rounds(const cotrain_run* run, size_t* n);
COTRAIN_API cotrain_status cotrain_run_round(const cotrain_run* run, size_t index,
                                             cotrain_round_metrics* out);
COTRAIN_API cotrain_status cotrain_run_pseudo_label_count(const cotrain_run* run, size_t* n);
/* Returns a new classifier handle copied from the final state of the run. */
COTRAIN_API cotrain_status cotrain_run_classifier(const cotrain_run* run, int view,
                                                  cotrain_classifier** out);
COTRAIN_API cotrain_status cotrain_run_write(const cotrain_run* run, const char* trajectory_csv,
                                             const char* records_csv);
COTRAIN_API void cotrain_run_free(cotrain_run* run);

COTRAIN_API cotrain_status cotrain_lemma(const cotrain_dataset* ds,
                                         const cotrain_cotrain_config* cfg, size_t handicap,
                                         cotrain_lemma_report* out);

/* ---- theory -------------------------------------------------------------- */

typedef struct cotrain_bound_inputs {
  double empirical_risk;
  size_t n_labeled;
  size_t n_unlabeled;
  double d_eff;
  double delta;
  double c1;
  double c2;
  double frac;
  double disagreement;
  double indep;
} cotrain_bound_inputs;

typedef struct cotrain_bound_report {
  double empirical_risk_term;
  double complexity_term;
  double gamma_term;
  double confidence_term;
  double bound;
} cotrain_bound_report;

typedef struct cotrain_contraction_fit {
  double lambda_hat;
  double c_min_hat;
  double alpha_hat;
  double r_squared;
  int lambda_in_unit_interval;
} cotrain_contraction_fit;

COTRAIN_API cotrain_status cotrain_gamma(double frac, double disagreement, double indep,
                                         double* out);
COTRAIN_API cotrain_status cotrain_bound(const cotrain_bound_inputs* in,
                                         cotrain_bound_report* out);
/* Writes rounds + 1 values; capacity must be at least that. */
COTRAIN_API cotrain_status cotrain_simulate_recursion(double lambda, double c_min, double eps0,
                                                      size_t rounds, double* out,
                                                      size_t capacity);
COTRAIN_API cotrain_status cotrain_fit_contraction(const double* trajectory, size_t n,
                                                   cotrain_contraction_fit* out);

/* ---- experiment commands --------------------------------------------------
 * Each reads a TOML experiment file, writes CSV artifacts under out_dir and
 * prints a short report on stdout. A NULL out_dir selects the config's
 * output_dir, or "out" when that is unset. cotrain_cmd_audit returns
 * COTRAIN_ERR_AUDIT_FAILED when a monotonicity claim is violated. */

COTRAIN_API cotrain_status cotrain_cmd_generate(const char* config_path, const char* out_dir,
                                                int64_t seed_offset);
COTRAIN_API cotrain_status cotrain_cmd_cotrain(const char* config_path, const char* out_dir,
                                               int64_t seed_offset);
COTRAIN_API cotrain_status cotrain_cmd_figures(const char* config_path, const char* out_dir,
                                               int64_t seed_offset);
COTRAIN_API cotrain_status cotrain_cmd_audit(const char* config_path, const char* out_dir,
                                             int64_t seed_offset);
COTRAIN_API cotrain_status cotrain_cmd_sweep(const char* config_path, const char* out_dir,
                                             int64_t seed_offset);

#ifdef __cplusplus
}
#endif

#endif /* COTRAIN_COTRAIN_H_ */
