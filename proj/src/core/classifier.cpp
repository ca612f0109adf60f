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

#include "classifier.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <fmt/format.h>

#include "csv.hpp"
#include "error.hpp"
#include "log.hpp"
#include "rng.hpp"

namespace cotrain {
namespace {

double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void check_dim(const ViewClassifier& clf, std::span<const double> x) {
  if (x.size() != clf.dim()) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("input has {} features, view-{} classifier expects {}", x.size(),
                            clf.view_index(), clf.dim()));
  }
}

// Probability and d(prob)/d(logit); the derivative is zero where clamped.
struct ClampedProb {
  double p;
  double dp_dz;
};

ClampedProb clamped_probability(double z, double clip) {
  const double raw = logistic(z);
  if (raw < clip) return {clip, 0.0};
  if (raw > 1.0 - clip) return {1.0 - clip, 0.0};
  return {raw, raw * (1.0 - raw)};
}

}  // namespace

ViewClassifier::ViewClassifier(int view_index, std::vector<double> weights, double prob_clip)
    : view_index_(view_index), weights_(std::move(weights)), prob_clip_(prob_clip) {
  if (view_index != 1 && view_index != 2) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("view_index = {} must be 1 or 2", view_index));
  }
  if (weights_.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "weight vector needs at least one feature weight and a bias");
  }
  if (!(prob_clip > 0.0 && prob_clip < 0.5)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("prob_clip = {} is outside (0, 0.5)", prob_clip), "prob_clip");
  }
}

ViewClassifier ViewClassifier::initialize(int view_index, std::size_t dim, double prob_clip,
                                          std::uint64_t seed) {
  Rng rng(seed, Stream::kClassifierInit);
  std::vector<double> w(dim + 1);
  for (double& v : w) v = 0.01 * rng.normal();
  return ViewClassifier(view_index, std::move(w), prob_clip);
}

double ViewClassifier::logit(std::span<const double> x) const {
  check_dim(*this, x);
  double z = weights_.back();
  for (std::size_t i = 0; i < x.size(); ++i) z += weights_[i] * x[i];
  return z;
}

double ViewClassifier::probability(std::span<const double> x) const {
  return clamped_probability(logit(x), prob_clip_).p;
}

Prediction ViewClassifier::predict(std::span<const double> x) const {
  Prediction out;
  out.prob_positive = probability(x);
  out.confidence = std::max(out.prob_positive, 1.0 - out.prob_positive);
  out.label = out.prob_positive >= 0.5 ? 1 : 0;
  return out;
}

Label pseudo_label(const Prediction& p) { return p.prob_positive >= 0.5 ? 1 : 0; }

void TrainConfig::validate() const {
  auto reject = [](const char* field, const std::string& why) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("{} {}", field, why), field);
  };
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    reject("learning_rate", fmt::format("= {} must be a positive real", learning_rate));
  }
  if (epochs < 1) reject("epochs", "must be at least 1");
  if (!(l2_penalty >= 0.0)) reject("l2_penalty", fmt::format("= {} must be >= 0", l2_penalty));
  if (!(lambda_agree >= 0.0)) {
    reject("lambda_agree", fmt::format("= {} must be >= 0", lambda_agree));
  }
  if (!(prob_clip > 0.0 && prob_clip < 0.5)) {
    reject("prob_clip", fmt::format("= {} is outside (0, 0.5)", prob_clip));
  }
}

LossGrad supervised_loss_grad(const ViewClassifier& clf, std::span<const Example> batch,
                              double l2) {
  if (batch.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "supervised loss needs a non-empty batch");
  }
  const auto w = clf.weights();
  const std::size_t d = clf.dim();
  LossGrad out;
  out.grad.assign(d + 1, 0.0);
  for (const auto& ex : batch) {
    const auto [p, dp] = clamped_probability(clf.logit(ex.x), clf.prob_clip());
    const double y = ex.label == 1 ? 1.0 : 0.0;
    out.loss -= y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
    // dL/dp = (p - y) / (p (1 - p)); chain through dp/dz.
    const double dz = dp * (p - y) / (p * (1.0 - p));
    for (std::size_t i = 0; i < d; ++i) out.grad[i] += dz * ex.x[i];
    out.grad[d] += dz;
  }
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  out.loss *= inv_n;
  for (double& g : out.grad) g *= inv_n;
  for (std::size_t i = 0; i < d; ++i) {
    out.loss += l2 * w[i] * w[i];
    out.grad[i] += 2.0 * l2 * w[i];
  }
  return out;
}

LossGrad agreement_loss_grad(const ViewClassifier& clf,
                             std::span<const std::span<const double>> inputs,
                             std::span<const double> peer_probs) {
  if (inputs.size() != peer_probs.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("agreement loss: {} inputs but {} peer probabilities",
                            inputs.size(), peer_probs.size()));
  }
  const std::size_t d = clf.dim();
  LossGrad out;
  out.grad.assign(d + 1, 0.0);
  if (inputs.empty()) return out;
  for (std::size_t n = 0; n < inputs.size(); ++n) {
    const auto [p, dp] = clamped_probability(clf.logit(inputs[n]), clf.prob_clip());
    const double diff = p - peer_probs[n];
    out.loss += diff * diff;
    const double dz = 2.0 * diff * dp;
    for (std::size_t i = 0; i < d; ++i) out.grad[i] += dz * inputs[n][i];
    out.grad[d] += dz;
  }
  const double inv_n = 1.0 / static_cast<double>(inputs.size());
  out.loss *= inv_n;
  for (double& g : out.grad) g *= inv_n;
  return out;
}

double stability_threshold(std::span<const Example> batch, double l2) {
  if (batch.empty()) return INFINITY;
  const std::size_t d = batch.front().x.size() + 1;
  std::vector<double> m(d * d, 0.0);
  for (const auto& ex : batch) {
    for (std::size_t i = 0; i < d; ++i) {
      const double xi = i + 1 < d ? ex.x[i] : 1.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double xj = j + 1 < d ? ex.x[j] : 1.0;
        m[i * d + j] += xi * xj;
      }
    }
  }
  for (double& v : m) v /= static_cast<double>(batch.size());

  // Power iteration; the matrix is symmetric positive semi-definite.
  std::vector<double> v(d, 1.0), next(d);
  double eig = 0.0;
  for (int iter = 0; iter < 500; ++iter) {
    for (std::size_t i = 0; i < d; ++i) {
      next[i] = 0.0;
      for (std::size_t j = 0; j < d; ++j) next[i] += m[i * d + j] * v[j];
    }
    double norm = 0.0;
    for (double x : next) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) break;
    for (std::size_t i = 0; i < d; ++i) v[i] = next[i] / norm;
    if (std::abs(norm - eig) <= 1e-12 * norm) {
      eig = norm;
      break;
    }
    eig = norm;
  }
  return 4.0 / (eig + 2.0 * l2);
}

ViewClassifier train(const ViewClassifier& clf, std::span<const Example> labeled,
                     std::span<const std::span<const double>> agree_inputs,
                     std::span<const double> peer_probs, const TrainConfig& cfg) {
  cfg.validate();
  if (agree_inputs.size() != peer_probs.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("agreement set has {} inputs but {} peer probabilities",
                            agree_inputs.size(), peer_probs.size()));
  }
  const bool use_agree = cfg.lambda_agree > 0.0 && !agree_inputs.empty();
  if (labeled.empty() && !use_agree) {
    throw Error(ErrorCode::kInvalidArgument, "training needs labeled examples");
  }
  for (const auto& ex : labeled) {
    if (ex.x.size() != clf.dim()) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("labeled example has {} features, classifier expects {}",
                              ex.x.size(), clf.dim()));
    }
  }
  if (const double limit = stability_threshold(labeled, cfg.l2_penalty);
      cfg.learning_rate > limit) {
    logger().warn("learning rate {} exceeds the stability threshold {:.4g}",
                   cfg.learning_rate, limit);
  }

  std::vector<double> w(clf.weights().begin(), clf.weights().end());
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const ViewClassifier current(clf.view_index(), w, clf.prob_clip());
    double loss = 0.0;
    std::vector<double> grad(w.size(), 0.0);
    if (!labeled.empty()) {
      auto sup = supervised_loss_grad(current, labeled, cfg.l2_penalty);
      loss += sup.loss;
      grad = std::move(sup.grad);
    }
    if (use_agree) {
      const auto agree = agreement_loss_grad(current, agree_inputs, peer_probs);
      loss += cfg.lambda_agree * agree.loss;
      for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += cfg.lambda_agree * agree.grad[i];
    }
    if (!std::isfinite(loss)) {
      throw Error(ErrorCode::kNumeric,
                  fmt::format("training diverged at epoch {} (learning_rate = {})", epoch,
                              cfg.learning_rate));
    }
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= cfg.learning_rate * grad[i];
  }
  for (double v : w) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kNumeric,
                  fmt::format("training diverged at epoch {} (learning_rate = {})", cfg.epochs,
                              cfg.learning_rate));
    }
  }
  return ViewClassifier(clf.view_index(), std::move(w), clf.prob_clip());
}

double evaluate_error(const ViewClassifier& clf, std::span<const Instance> oracle_set,
                      int view) {
  if (oracle_set.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "cannot evaluate error on an empty set");
  }
  std::size_t wrong = 0;
  for (const auto& inst : oracle_set) {
    if (!inst.oracle_label) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("instance {} has no oracle label", inst.id));
    }
    if (clf.predict(inst.view(view)).label != *inst.oracle_label) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(oracle_set.size());
}

std::vector<Example> examples_for_view(std::span<const Instance> instances, int view) {
  std::vector<Example> out;
  out.reserve(instances.size());
  for (const auto& inst : instances) {
    if (!inst.oracle_label) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("instance {} has no label", inst.id));
    }
    out.push_back({inst.view(view), *inst.oracle_label});
  }
  return out;
}

void save_checkpoint(const ViewClassifier& clf, const std::filesystem::path& path) {
  std::vector<std::string> header = {"view_index", "prob_clip"};
  for (std::size_t i = 0; i < clf.weights().size(); ++i) header.push_back(fmt::format("w_{}", i));
  csv::Writer out(path, header);
  out.field(clf.view_index()).field(clf.prob_clip());
  for (double v : clf.weights()) out.field(v);
  out.end_row();
}

ViewClassifier load_checkpoint(const std::filesystem::path& path) {
  const auto table = csv::read(path);
  if (table.rows.size() != 1) {
    throw Error(ErrorCode::kIo, fmt::format("checkpoint '{}' must hold exactly one row",
                                            path.string()));
  }
  const auto& row = table.rows.front();
  const auto ctx = path.string();
  const int view = static_cast<int>(csv::parse_int(row[table.column("view_index")], ctx));
  const double clip = csv::parse_real(row[table.column("prob_clip")], ctx);
  std::vector<double> w;
  for (std::size_t i = table.column("w_0"); i < row.size(); ++i) {
    w.push_back(csv::parse_real(row[i], ctx));
  }
  return ViewClassifier(view, std::move(w), clip);
}

}  // namespace cotrain
