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

#include "cotrain/cotrain.h"

#include <cmath>
#include <iostream>
#include <new>
#include <string>
#include <utility>

#include <fmt/format.h>

#include "classifier.hpp"
#include "data.hpp"
#include "engine.hpp"
#include "error.hpp"
#include "experiment.hpp"
#include "theory.hpp"

struct cotrain_dataset {
  cotrain::Dataset ds;
};

struct cotrain_classifier {
  cotrain::ViewClassifier clf;
};

struct cotrain_run {
  cotrain::CoTrainResult result;
};

namespace {

thread_local std::string g_last_error;

cotrain_status to_status(cotrain::ErrorCode code) {
  switch (code) {
    case cotrain::ErrorCode::kInvalidArgument: return COTRAIN_ERR_INVALID_ARGUMENT;
    case cotrain::ErrorCode::kIo: return COTRAIN_ERR_IO;
    case cotrain::ErrorCode::kConfig: return COTRAIN_ERR_CONFIG;
    case cotrain::ErrorCode::kNumeric: return COTRAIN_ERR_NUMERIC;
    case cotrain::ErrorCode::kAuditFailed: return COTRAIN_ERR_AUDIT_FAILED;
  }
  return COTRAIN_ERR_INTERNAL;
}

cotrain_status fail(cotrain_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <typename F>
cotrain_status guarded(F&& body) {
  g_last_error.clear();
  try {
    return body();
  } catch (const cotrain::Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(COTRAIN_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(COTRAIN_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(COTRAIN_ERR_INTERNAL, "unknown exception");
  }
}

#define COTRAIN_REQUIRE(ptr)                                                        \
  do {                                                                              \
    if ((ptr) == nullptr) return fail(COTRAIN_ERR_INVALID_ARGUMENT, #ptr " is null"); \
  } while (0)

cotrain::GeneratorConfig from_c(const cotrain_generator_config& c) {
  cotrain::GeneratorConfig g;
  g.dim_view1 = c.dim_view1;
  g.dim_view2 = c.dim_view2;
  g.class_separation = c.class_separation;
  g.noise_sigma = c.noise_sigma;
  g.rho = c.rho;
  g.latent_dim = c.latent_dim;
  g.n_labeled = c.n_labeled;
  g.n_unlabeled = c.n_unlabeled;
  g.n_test = c.n_test;
  g.class_balance = c.class_balance;
  g.shift_magnitude = c.shift_magnitude;
  g.seed = c.seed;
  return g;
}

cotrain::TrainConfig from_c(const cotrain_train_config& c) {
  cotrain::TrainConfig t;
  t.learning_rate = c.learning_rate;
  t.epochs = c.epochs;
  t.l2_penalty = c.l2_penalty;
  t.lambda_agree = c.lambda_agree;
  t.prob_clip = c.prob_clip;
  t.seed = c.seed;
  return t;
}

cotrain_train_config to_c(const cotrain::TrainConfig& t) {
  return {t.learning_rate, t.epochs, t.l2_penalty, t.lambda_agree, t.prob_clip, t.seed};
}

cotrain::CoTrainConfig from_c(const cotrain_cotrain_config& c) {
  cotrain::CoTrainConfig k;
  k.rounds = c.rounds;
  k.tau_pseudo = c.tau_pseudo;
  k.tau_agree = c.tau_agree;
  k.k_pseudo = c.k_pseudo;
  k.lambda_agree = c.lambda_agree;
  k.accumulate_pseudo = c.accumulate_pseudo != 0;
  k.delta0 = c.delta0;
  k.seed = c.seed;
  k.train = from_c(c.train);
  return k;
}

const std::vector<cotrain::Instance>* partition(const cotrain::Dataset& ds, int part) {
  switch (part) {
    case COTRAIN_LABELED: return &ds.labeled;
    case COTRAIN_UNLABELED: return &ds.unlabeled;
    case COTRAIN_TEST: return &ds.test;
    default: return nullptr;
  }
}

cotrain_status run_command(const char* config_path, const char* out_dir, int64_t seed_offset,
                           bool (*cmd)(const cotrain::ExperimentConfig&,
                                       const cotrain::RunOptions&, std::ostream&)) {
  COTRAIN_REQUIRE(config_path);
  return guarded([&] {
    const auto cfg = cotrain::load_experiment_config(config_path);
    cotrain::RunOptions opts;
    if (out_dir != nullptr) {
      opts.out_dir = out_dir;
    } else if (!cfg.output_dir.empty()) {
      opts.out_dir = cfg.output_dir;
    }
    opts.seed_offset = seed_offset;
    const bool ok = cmd(cfg, opts, std::cout);
    std::cout.flush();
    if (!ok) return fail(COTRAIN_ERR_AUDIT_FAILED, "monotonicity audit found violations");
    return COTRAIN_OK;
  });
}

template <void (*Cmd)(const cotrain::ExperimentConfig&, const cotrain::RunOptions&,
                      std::ostream&)>
bool always_ok(const cotrain::ExperimentConfig& c, const cotrain::RunOptions& o,
               std::ostream& r) {
  Cmd(c, o, r);
  return true;
}

}  // namespace

extern "C" {

const char* cotrain_version(void) { return "0.1.0"; }

const char* cotrain_last_error(void) { return g_last_error.c_str(); }

const char* cotrain_status_name(cotrain_status status) {
  switch (status) {
    case COTRAIN_OK: return "ok";
    case COTRAIN_ERR_INVALID_ARGUMENT: return "invalid argument";
    case COTRAIN_ERR_IO: return "i/o error";
    case COTRAIN_ERR_CONFIG: return "configuration error";
    case COTRAIN_ERR_NUMERIC: return "numerical failure";
    case COTRAIN_ERR_AUDIT_FAILED: return "audit failed";
    case COTRAIN_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void cotrain_generator_config_default(cotrain_generator_config* cfg) {
  if (cfg == nullptr) return;
  const cotrain::GeneratorConfig g;
  *cfg = {g.dim_view1,   g.dim_view2,   g.class_separation, g.noise_sigma,
          g.rho,         g.latent_dim,  g.n_labeled,        g.n_unlabeled,
          g.n_test,      g.class_balance, g.shift_magnitude, g.seed};
}

cotrain_status cotrain_dataset_generate(const cotrain_generator_config* cfg,
                                        cotrain_dataset** out) {
  COTRAIN_REQUIRE(cfg);
  COTRAIN_REQUIRE(out);
  return guarded([&] {
    *out = new cotrain_dataset{cotrain::generate_dataset(from_c(*cfg))};
    return COTRAIN_OK;
  });
}

cotrain_status cotrain_dataset_load(const char* dataset_csv, const char* oracle_csv,
                                    cotrain_dataset** out) {
  COTRAIN_REQUIRE(dataset_csv);
  COTRAIN_REQUIRE(oracle_csv);
  COTRAIN_REQUIRE(out);
  return guarded([&] {
    *out = new cotrain_dataset{cotrain::load_dataset_csv(dataset_csv, oracle_csv)};
    return COTRAIN_OK;
  });
}

cotrain_status cotrain_dataset_save(const cotrain_dataset* ds, const char* dataset_csv,
                                    const char* oracle_csv) {
  COTRAIN_REQUIRE(ds);
  COTRAIN_REQUIRE(dataset_csv);
  COTRAIN_REQUIRE(oracle_csv);
  return guarded([&] {
    cotrain::save_dataset_csv(ds->ds, dataset_csv, oracle_csv);
    return COTRAIN_OK;
  });
}

cotrain_status cotrain_dataset_shift(const cotrain_dataset* ds, double magnitude, uint64_t seed,
                                     int shift_unlabeled, cotrain_dataset** out) {
  COTRAIN_REQUIRE(ds);
  COTRAIN_REQUIRE(out);
  return guarded([&] {
    *out = new cotrain_dataset{cotrain::apply_shift(ds->ds, magnitude, seed, shift_unlabeled != 0)};
    return COTRAIN_OK;
  });
}

cotrain_status cotrain_dataset_sizes(const cotrain_dataset* ds, size_t* n_labeled,
                                     size_t* n_unlabeled, size_t* n_test, size_t* dim_view1,
                                     size_t* dim_view2) {
  COTRAIN_REQUIRE(ds);
  return guarded([&] {
    if (n_labeled) *n_labeled = ds->ds.labeled.size();
    if (n_unlabeled) *n_unlabeled = ds->ds.unlabeled.size();
    if (n_test) *n_test = ds->ds.test.size();
    if (dim_view1) *dim_view1 = ds->ds.dim(1);
    if (dim_view2) *dim_view2 = ds->ds.dim(2);
    return COTRAIN_OK;
  });
}

cotrain_status cotrain_dataset_features(const cotrain_dataset* ds, cotrain_partition part,
                                        size_t index, int view, double* buffer, size_t capacity,
                                        size_t* dim) {
  COTRAIN_REQUIRE(ds);
  const auto* rows = partition(ds->ds, part);
  if (rows == nullptr) return fail(COTRAIN_ERR_INVALID_ARGUMENT, "unknown partition");
  if (view != 1 && view != 2) {
    return fail(COTRAIN_ERR_INVALID_ARGUMENT, fmt::format("view = {} must be 1 or 2", view));
  }
  if (index >= rows->size()) {
    return fail(COTRAIN_ERR_INVALID_ARGUMENT,
                fmt::format("index {} out of range (size {})", index, rows->size()));
  }
  const auto& x = (*rows)[index].view(view);
  if (dim) *dim = x.size();
  if (buffer == nullptr) return COTRAIN_OK;
  if (capacity < x.size()) {
    return fail(COTRAIN_ERR_INVALID_ARGUMENT,
                fmt::format("buffer holds {} values, need {}", capacity, x.size()));
  }
  std::copy(x.begin(), x.end(), buffer);
  return COTRAIN_OK;
}

cotrain_status cotrain_dataset_dependence(const cotrain_dataset* ds, double* stat,
                                          double* indep) {
  COTRAIN_REQUIRE(ds);
  return guarded([&] {
    const auto d = cotrain::conditional_dependence_stat(ds->ds);
    if (stat) *stat = d.stat;
    if (indep) *indep = d.indep;
    return COTRAIN_OK;
  });
}

void cotrain_dataset_free(cotrain_dataset* ds) { delete ds; }

void cotrain_train_config_default(cotrain_train_config* cfg) {
  if (cfg != nullptr) *cfg = to_c(cotrain::TrainConfig{});
}

cotrain_status cotrain_classifier_create(int view, const double* weights, size_t n_weights,
                                         double prob_clip, cotrain_classifier** out) {
  COTRAIN_REQUIRE(weights);
  COTRAIN_REQUIRE(out);
  return guarded([&] {
    *out = new cotrain_classifier{
        cotrain::ViewClassifier(view, std::vector<double>(weights, weights + n_weights),
                                prob_clip)};
    return COTRAIN_OK;
  });
}

cotrain_status cotrain_classifier_train(const cotrain_dataset* ds, int view,
                                        const cotrain_train_config* cfg,
                                        cotrain_classifier** out) {
  COTRAIN_REQUIRE(ds);
  COTRAIN_REQUIRE(cfg);
  COTRAIN_REQUIRE(out);
  return guarded([&] {
    *out = new cotrain_classifier{cotrain::supervised_baseline(ds->ds, view, from_c(*cfg))};
    return COTRAIN_OK;
  });
}

cotrain_status cotrain_classifier_predict(const cotrain_classifier* clf, const double* x,
                                          size_t dim, double* prob_positive, int* label) {
  COTRAIN_REQUIRE(clf);
  COTRAIN_REQUIRE(x);
  return guarded([&] {
    const auto p = clf->clf.predict(std::span<const double>(x, dim));
    if (prob_positive) *prob_positive = p.prob_positive;
    if (label) *label = p.label;
    return COTRAIN_OK;
  });
}

cotrain_status cotrain_classifier_error(const cotrain_classifier* clf, const cotrain_dataset* ds,
                                        cotrain_partition part, double* error) {
  COTRAIN_REQUIRE(clf);
  COTRAIN_REQUIRE(ds);
  COTRAIN_REQUIRE(error);
  const auto* rows = partition(ds->ds, part);
  if (rows == nullptr) return fail(COTRAIN_ERR_INVALID_ARGUMENT, "unknown partition");
  return guarded([&] {
    *error = cotrain::evaluate_error(clf->clf, *rows, clf->clf.view_index());
    return COTRAIN_OK;
  });
}

cotrain_status cotrain_classifier_weights(const cotrain_classifier* clf, double* buffer,
                                          size_t capacity, size_t* n_weights) {
  COTRAIN_REQUIRE(clf);
  const auto w = clf->clf.weights();
  if (n_weights) *n_weights = w.size();
  if (buffer == nullptr) return COTRAIN_OK;
  if (capacity < w.size()) {
    return fail(COTRAIN_ERR_INVALID_ARGUMENT,
                fmt::format("buffer holds {} values, need {}", capacity, w.size()));
  }
  std::copy(w.begin(), w.end(), buffer);
  return COTRAIN_OK;
}

cotrain_status cotrain_classifier_save(const cotrain_classifier* clf, const char* path) {
  COTRAIN_REQUIRE(clf);
  COTRAIN_REQUIRE(path);
  return guarded([&] {
    cotrain::save_checkpoint(clf->clf, path);
    return COTRAIN_OK;
  });
}

cotrain_status cotrain_classifier_load(const char* path, cotrain_classifier** out) {
  COTRAIN_REQUIRE(path);
  COTRAIN_REQUIRE(out);
  return guarded([&] {
    *out = new cotrain_classifier{cotrain::load_checkpoint(path)};
    return COTRAIN_OK;
  });
}

void cotrain_classifier_free(cotrain_classifier* clf) { delete clf; }

void cotrain_cotrain_config_default(cotrain_cotrain_config* cfg) {
  if (cfg == nullptr) return;
  const cotrain::CoTrainConfig c;
  cfg->rounds = c.rounds;
  cfg->tau_pseudo = c.tau_pseudo;
  cfg->tau_agree = c.tau_agree;
  cfg->k_pseudo = c.k_pseudo;
  cfg->lambda_agree = c.lambda_agree;
  cfg->accumulate_pseudo = c.accumulate_pseudo ? 1 : 0;
  cfg->delta0 = c.delta0;
  cfg->seed = c.seed;
  cfg->train = to_c(c.train);
}

cotrain_status cotrain_run_cotraining(const cotrain_dataset* ds,
                                      const cotrain_cotrain_config* cfg, cotrain_run** out) {
  COTRAIN_REQUIRE(ds);
  COTRAIN_REQUIRE(cfg);
  COTRAIN_REQUIRE(out);
  return guarded([&] {
    *out = new cotrain_run{cotrain::run_cotraining(ds->ds, from_c(*cfg))};
    return COTRAIN_OK;
  });
}

cotrain_status cotrain_run_rounds(const cotrain_run* run, size_t* n) {
  COTRAIN_REQUIRE(run);
  COTRAIN_REQUIRE(n);
  *n = run->result.trajectory.size();
  return COTRAIN_OK;
}

cotrain_status cotrain_run_round(const cotrain_run* run, size_t index,
                                 cotrain_round_metrics* out) {
  COTRAIN_REQUIRE(run);
  COTRAIN_REQUIRE(out);
  if (index >= run->result.trajectory.size()) {
    return fail(COTRAIN_ERR_INVALID_ARGUMENT,
                fmt::format("round index {} out of range ({} rows)", index,
                            run->result.trajectory.size()));
  }
  const auto& m = run->result.trajectory[index];
  *out = {m.round,     m.err_view1,   m.err_view2,   m.err_max,        m.disagreement,
          m.pool_size, m.added_view1, m.added_view2, m.pseudo_accuracy};
  return COTRAIN_OK;
}

cotrain_status cotrain_run_pseudo_label_count(const cotrain_run* run, size_t* n) {
  COTRAIN_REQUIRE(run);
  COTRAIN_REQUIRE(n);
  *n = run->result.records.size();
  return COTRAIN_OK;
}

cotrain_status cotrain_run_classifier(const cotrain_run* run, int view,
                                      cotrain_classifier** out) {
  COTRAIN_REQUIRE(run);
  COTRAIN_REQUIRE(out);
  if (view != 1 && view != 2) {
    return fail(COTRAIN_ERR_INVALID_ARGUMENT, fmt::format("view = {} must be 1 or 2", view));
  }
  return guarded([&] {
    *out = new cotrain_classifier{view == 1 ? run->result.clf1 : run->result.clf2};
    return COTRAIN_OK;
  });
}

cotrain_status cotrain_run_write(const cotrain_run* run, const char* trajectory_csv,
                                 const char* records_csv) {
  COTRAIN_REQUIRE(run);
  return guarded([&] {
    if (trajectory_csv) cotrain::write_trajectory_csv(run->result.trajectory, trajectory_csv);
    if (records_csv) cotrain::write_records_csv(run->result.records, records_csv);
    return COTRAIN_OK;
  });
}

void cotrain_run_free(cotrain_run* run) { delete run; }

cotrain_status cotrain_lemma(const cotrain_dataset* ds, const cotrain_cotrain_config* cfg,
                             size_t handicap, cotrain_lemma_report* out) {
  COTRAIN_REQUIRE(ds);
  COTRAIN_REQUIRE(cfg);
  COTRAIN_REQUIRE(out);
  return guarded([&] {
    const auto r = cotrain::one_step_lemma_experiment(ds->ds, from_c(*cfg), handicap);
    *out = {r.eps1_before, r.eps2,          r.eps1_after,     r.improved ? 1 : 0,
            r.precondition_violated ? 1 : 0, r.pseudo_labels, r.pseudo_accuracy};
    return COTRAIN_OK;
  });
}

cotrain_status cotrain_gamma(double frac, double disagreement, double indep, double* out) {
  COTRAIN_REQUIRE(out);
  return guarded([&] {
    *out = cotrain::gamma({frac, disagreement, indep});
    return COTRAIN_OK;
  });
}

cotrain_status cotrain_bound(const cotrain_bound_inputs* in, cotrain_bound_report* out) {
  COTRAIN_REQUIRE(in);
  COTRAIN_REQUIRE(out);
  return guarded([&] {
    cotrain::BoundInputs b;
    b.empirical_risk = in->empirical_risk;
    b.n_labeled = in->n_labeled;
    b.n_unlabeled = in->n_unlabeled;
    b.d_eff = in->d_eff;
    b.delta = in->delta;
    b.c1 = in->c1;
    b.c2 = in->c2;
    b.gamma_inputs = {in->frac, in->disagreement, in->indep};
    const auto r = cotrain::generalization_bound(b);
    *out = {r.empirical_risk_term, r.complexity_term, r.gamma_term, r.confidence_term, r.bound};
    return COTRAIN_OK;
  });
}

cotrain_status cotrain_simulate_recursion(double lambda, double c_min, double eps0,
                                          size_t rounds, double* out, size_t capacity) {
  COTRAIN_REQUIRE(out);
  if (capacity < rounds + 1) {
    return fail(COTRAIN_ERR_INVALID_ARGUMENT,
                fmt::format("buffer holds {} values, need {}", capacity, rounds + 1));
  }
  return guarded([&] {
    const auto eps = cotrain::simulate_recursion(lambda, c_min, eps0, rounds);
    std::copy(eps.begin(), eps.end(), out);
    return COTRAIN_OK;
  });
}

cotrain_status cotrain_fit_contraction(const double* trajectory, size_t n,
                                       cotrain_contraction_fit* out) {
  COTRAIN_REQUIRE(trajectory);
  COTRAIN_REQUIRE(out);
  return guarded([&] {
    const auto f = cotrain::fit_contraction(std::span<const double>(trajectory, n));
    *out = {f.lambda_hat, f.c_min_hat, f.alpha_hat, f.r_squared,
            f.lambda_in_unit_interval ? 1 : 0};
    return COTRAIN_OK;
  });
}

cotrain_status cotrain_cmd_generate(const char* config_path, const char* out_dir,
                                    int64_t seed_offset) {
  return run_command(config_path, out_dir, seed_offset, &always_ok<cotrain::cmd_generate>);
}

cotrain_status cotrain_cmd_cotrain(const char* config_path, const char* out_dir,
                                   int64_t seed_offset) {
  return run_command(config_path, out_dir, seed_offset, &always_ok<cotrain::cmd_cotrain>);
}

cotrain_status cotrain_cmd_figures(const char* config_path, const char* out_dir,
                                   int64_t seed_offset) {
  return run_command(config_path, out_dir, seed_offset, &always_ok<cotrain::cmd_figures>);
}

cotrain_status cotrain_cmd_audit(const char* config_path, const char* out_dir,
                                 int64_t seed_offset) {
  return run_command(config_path, out_dir, seed_offset, &cotrain::cmd_audit);
}

cotrain_status cotrain_cmd_sweep(const char* config_path, const char* out_dir,
                                 int64_t seed_offset) {
  return run_command(config_path, out_dir, seed_offset, &always_ok<cotrain::cmd_sweep>);
}

}  // extern "C"
