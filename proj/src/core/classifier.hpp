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

// Per-view logistic-linear classifiers and their training losses.
#ifndef COTRAIN_CORE_CLASSIFIER_HPP_
#define COTRAIN_CORE_CLASSIFIER_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "data.hpp"

namespace cotrain {

inline constexpr double kDefaultProbClip = 1e-3;

struct Prediction {
  double prob_positive = 0.5;
  double confidence = 0.5;  // max(p, 1 - p)
  Label label = 1;          // 1 iff p >= 0.5
};

class ViewClassifier {
 public:
  // weights holds one entry per feature followed by the bias.
  ViewClassifier(int view_index, std::vector<double> weights,
                 double prob_clip = kDefaultProbClip);

  // Weights ~ N(0, 0.01^2) from the classifier-init stream of `seed`. The
  // draw does not depend on the view index.
  static ViewClassifier initialize(int view_index, std::size_t dim, double prob_clip,
                                   std::uint64_t seed);

  int view_index() const { return view_index_; }
  std::size_t dim() const { return weights_.size() - 1; }
  double prob_clip() const { return prob_clip_; }
  std::span<const double> weights() const { return weights_; }

  double logit(std::span<const double> x) const;
  double probability(std::span<const double> x) const;
  Prediction predict(std::span<const double> x) const;

  bool operator==(const ViewClassifier&) const = default;

 private:
  int view_index_;
  std::vector<double> weights_;
  double prob_clip_;
};

Label pseudo_label(const Prediction& p);

struct TrainConfig {
  double learning_rate = 0.25;
  std::size_t epochs = 200;
  double l2_penalty = 1e-3;
  double lambda_agree = 0.0;
  double prob_clip = kDefaultProbClip;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Example {
  std::span<const double> x;
  Label label = 0;
};

struct LossGrad {
  double loss = 0.0;
  std::vector<double> grad;
};

// Mean clamped cross-entropy plus l2 * ||w without bias||^2.
LossGrad supervised_loss_grad(const ViewClassifier& clf, std::span<const Example> batch,
                              double l2);

// Mean squared difference between own and frozen peer probabilities. The
// gradient is taken with respect to the own weights only.
LossGrad agreement_loss_grad(const ViewClassifier& clf,
                             std::span<const std::span<const double>> inputs,
                             std::span<const double> peer_probs);

// Largest learning rate for which full-batch descent is documented as
// stable: 4 / (max eigenvalue of E[[x;1][x;1]^T] + 2 * l2).
double stability_threshold(std::span<const Example> batch, double l2);

// Full-batch gradient descent on L_sup + lambda_agree * L_agree, warm-started
// from `clf`. `labeled` may be empty only if `agree_inputs` is not.
ViewClassifier train(const ViewClassifier& clf, std::span<const Example> labeled,
                     std::span<const std::span<const double>> agree_inputs,
                     std::span<const double> peer_probs, const TrainConfig& cfg);

// 0-1 error of `clf` on `view` of the instances, using their oracle labels.
double evaluate_error(const ViewClassifier& clf, std::span<const Instance> oracle_set,
                      int view);

// Labeled batch view over instances that carry oracle labels.
std::vector<Example> examples_for_view(std::span<const Instance> instances, int view);

// Checkpoint: header view_index,prob_clip,w_0..w_d and one data row.
void save_checkpoint(const ViewClassifier& clf, const std::filesystem::path& path);
ViewClassifier load_checkpoint(const std::filesystem::path& path);

}  // namespace cotrain

#endif  // COTRAIN_CORE_CLASSIFIER_HPP_
