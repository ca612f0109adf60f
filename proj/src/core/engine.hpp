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

// Two-view co-training with cross-view pseudo-label exchange.
#ifndef COTRAIN_CORE_ENGINE_HPP_
#define COTRAIN_CORE_ENGINE_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "classifier.hpp"
#include "data.hpp"

namespace cotrain {

struct CoTrainConfig {
  std::size_t rounds = 10;
  double tau_pseudo = 0.8;
  // Pool instances enter the agreement term only when the frozen peer's
  // confidence exceeds tau_agree; 0.5 admits the whole pool.
  double tau_agree = 0.5;
  std::size_t k_pseudo = 20;
  double lambda_agree = 0.1;
  // Keep every past selection in a view's training set instead of only the
  // current round's.
  bool accumulate_pseudo = false;
  TrainConfig train;
  std::uint64_t seed = 0;
  // Margin below 1/2 that initial errors should respect.
  double delta0 = 0.02;

  void validate() const;
};

struct PseudoLabelRecord {
  std::int64_t instance_id = 0;
  int source_view = 1;
  int assigned_to_view = 2;
  Label label = 0;
  double confidence = 0.0;
  int round = 0;
  bool oracle_correct = false;
};

struct RoundMetrics {
  int round = 0;
  double err_view1 = 0.0;
  double err_view2 = 0.0;
  double err_max = 0.0;
  double disagreement = 0.0;
  std::size_t pool_size = 0;
  std::size_t added_view1 = 0;
  std::size_t added_view2 = 0;
  double pseudo_accuracy = 0.0;  // NaN when nothing was added
};

// Candidates destined for each view's training set: for_view1 holds labels
// produced by view 2 and vice versa.
struct Harvest {
  std::vector<PseudoLabelRecord> for_view1;
  std::vector<PseudoLabelRecord> for_view2;
};

Harvest harvest_pseudo_labels(const ViewClassifier& clf1, const ViewClassifier& clf2,
                              std::span<const Instance> pool, double tau_pseudo,
                              int round = 0);

// Up to k records ordered by confidence (descending) then instance id.
std::vector<PseudoLabelRecord> select_top_k(std::vector<PseudoLabelRecord> candidates,
                                            std::size_t k);

// Initialisation from cfg.seed followed by supervised training on the
// labeled partition. Shared by the engine and by baseline comparisons.
ViewClassifier supervised_baseline(const Dataset& ds, int view, const TrainConfig& cfg);

struct CoTrainResult {
  ViewClassifier clf1;
  ViewClassifier clf2;
  std::vector<RoundMetrics> trajectory;
  std::vector<PseudoLabelRecord> records;
  bool initial_quality_ok = true;
};

CoTrainResult run_cotraining(const Dataset& ds, const CoTrainConfig& cfg);

struct LemmaReport {
  double eps1_before = 0.0;
  double eps2 = 0.0;
  double eps1_after = 0.0;
  bool improved = false;
  bool precondition_violated = false;  // eps2 < min(eps1_before, 1/2) fails
  std::size_t pseudo_labels = 0;
  double pseudo_accuracy = 0.0;
};

// View 1 starts from the first `handicap` labeled instances, view 2 from all
// of them. View 2 pseudo-labels the whole pool above tau_pseudo and view 1
// retrains on its subset plus those labels (supervised loss only).
LemmaReport one_step_lemma_experiment(const Dataset& ds, const CoTrainConfig& cfg,
                                      std::size_t handicap);

// trajectory.csv / records.csv writers.
void write_trajectory_csv(std::span<const RoundMetrics> trajectory,
                          const std::filesystem::path& path);
void write_records_csv(std::span<const PseudoLabelRecord> records,
                       const std::filesystem::path& path);

}  // namespace cotrain

#endif  // COTRAIN_CORE_ENGINE_HPP_
