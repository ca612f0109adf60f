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

#include "engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <unordered_map>

#include <fmt/format.h>

#include "csv.hpp"
#include "error.hpp"
#include "log.hpp"
#include "theory.hpp"

namespace cotrain {

void CoTrainConfig::validate() const {
  auto reject = [](const char* field, const std::string& why) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("{} {}", field, why), field);
  };
  if (rounds < 1) reject("rounds", "must be at least 1");
  if (!(tau_pseudo >= 0.5 && tau_pseudo < 1.0)) {
    reject("tau_pseudo", fmt::format("= {} is outside [0.5, 1)", tau_pseudo));
  }
  if (!(tau_agree >= 0.5 && tau_agree < 1.0)) {
    reject("tau_agree", fmt::format("= {} is outside [0.5, 1)", tau_agree));
  }
  if (k_pseudo < 1) reject("k_pseudo", "must be at least 1");
  if (!(lambda_agree >= 0.0)) {
    reject("lambda_agree", fmt::format("= {} must be >= 0", lambda_agree));
  }
  if (!(delta0 >= 0.0 && delta0 < 0.5)) {
    reject("delta0", fmt::format("= {} is outside [0, 0.5)", delta0));
  }
  train.validate();
}

Harvest harvest_pseudo_labels(const ViewClassifier& clf1, const ViewClassifier& clf2,
                              std::span<const Instance> pool, double tau_pseudo, int round) {
  Harvest out;
  for (const auto& inst : pool) {
    for (int v = 1; v <= 2; ++v) {
      const auto& clf = v == 1 ? clf1 : clf2;
      const auto pred = clf.predict(inst.view(v));
      if (!(pred.confidence > tau_pseudo)) continue;
      PseudoLabelRecord rec;
      rec.instance_id = inst.id;
      rec.source_view = v;
      rec.assigned_to_view = 3 - v;
      rec.label = pseudo_label(pred);
      rec.confidence = pred.confidence;
      rec.round = round;
      rec.oracle_correct = inst.oracle_label && *inst.oracle_label == rec.label;
      (v == 1 ? out.for_view2 : out.for_view1).push_back(rec);
    }
  }
  return out;
}

std::vector<PseudoLabelRecord> select_top_k(std::vector<PseudoLabelRecord> candidates,
                                            std::size_t k) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be at least 1");
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const PseudoLabelRecord& a, const PseudoLabelRecord& b) {
                     if (a.confidence != b.confidence) return a.confidence > b.confidence;
                     return a.instance_id < b.instance_id;
                   });
  std::vector<PseudoLabelRecord> out;
  std::set<std::int64_t> seen;
  for (auto& rec : candidates) {
    if (out.size() == k) break;
    if (!seen.insert(rec.instance_id).second) continue;
    out.push_back(std::move(rec));
  }
  return out;
}

ViewClassifier supervised_baseline(const Dataset& ds, int view, const TrainConfig& cfg) {
  if (ds.labeled.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "labeled set is empty");
  }
  TrainConfig sup = cfg;
  sup.lambda_agree = 0.0;
  const auto init = ViewClassifier::initialize(view, ds.dim(view), sup.prob_clip, sup.seed);
  const auto batch = examples_for_view(ds.labeled, view);
  return train(init, batch, {}, {}, sup);
}

namespace {

struct PseudoExample {
  std::vector<double> x;
  Label label;
};

bool admitted_by_tau_agree(double confidence, double tau_agree) {
  return tau_agree <= 0.5 || confidence > tau_agree;
}

// Retrains `target` on labeled + pseudo-labeled data with the agreement term
// computed against the frozen `peer` over the gated pool.
ViewClassifier retrain_view(const ViewClassifier& target, const ViewClassifier& peer,
                            const Dataset& ds, std::span<const PseudoExample> pseudo,
                            std::span<const Instance> pool, const CoTrainConfig& cfg,
                            const TrainConfig& tc) {
  const int v = target.view_index();
  auto batch = examples_for_view(ds.labeled, v);
  for (const auto& p : pseudo) batch.push_back({p.x, p.label});

  std::vector<std::span<const double>> agree_inputs;
  std::vector<double> peer_probs;
  if (tc.lambda_agree > 0.0) {
    for (const auto& inst : pool) {
      const auto pred = peer.predict(inst.view(peer.view_index()));
      if (!admitted_by_tau_agree(pred.confidence, cfg.tau_agree)) continue;
      agree_inputs.push_back(inst.view(v));
      peer_probs.push_back(pred.prob_positive);
    }
  }
  return train(target, batch, agree_inputs, peer_probs, tc);
}

}  // namespace

CoTrainResult run_cotraining(const Dataset& ds, const CoTrainConfig& cfg) {
  cfg.validate();
  if (ds.labeled.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "co-training needs a non-empty labeled set");
  }
  if (ds.test.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "co-training metrics need a non-empty test set");
  }
  TrainConfig tc = cfg.train;
  tc.seed = cfg.seed;
  tc.lambda_agree = cfg.lambda_agree;

  CoTrainResult result{supervised_baseline(ds, 1, tc), supervised_baseline(ds, 2, tc), {}, {},
                       true};
  auto& clf1 = result.clf1;
  auto& clf2 = result.clf2;
  std::vector<Instance> pool = ds.unlabeled;

  auto record_metrics = [&](int round, std::size_t added1, std::size_t added2,
                            double pseudo_accuracy) {
    RoundMetrics m;
    m.round = round;
    m.err_view1 = evaluate_error(clf1, ds.test, 1);
    m.err_view2 = evaluate_error(clf2, ds.test, 2);
    m.err_max = std::max(m.err_view1, m.err_view2);
    // An exhausted pool falls back to the (label-free) test inputs.
    m.disagreement = disagreement_rate(clf1, clf2, pool.empty() ? std::span(ds.test)
                                                                : std::span(pool));
    m.pool_size = pool.size();
    m.added_view1 = added1;
    m.added_view2 = added2;
    m.pseudo_accuracy = pseudo_accuracy;
    result.trajectory.push_back(m);
  };

  record_metrics(0, 0, 0, std::numeric_limits<double>::quiet_NaN());
  const auto& init = result.trajectory.front();
  const double limit = 0.5 - cfg.delta0;
  if (!(init.err_view1 < limit && init.err_view2 < limit)) {
    result.initial_quality_ok = false;
    logger().warn("initial classifiers violate the quality precondition: errors {:.4f}/{:.4f}, "
                  "required < {:.4f}",
                  init.err_view1, init.err_view2, limit);
  }

  std::vector<PseudoExample> kept1, kept2;
  for (std::size_t t = 1; t <= cfg.rounds; ++t) {
    const int round = static_cast<int>(t);
    auto harvest = harvest_pseudo_labels(clf1, clf2, pool, cfg.tau_pseudo, round);
    auto sel1 = select_top_k(std::move(harvest.for_view1), cfg.k_pseudo);
    auto sel2 = select_top_k(std::move(harvest.for_view2), cfg.k_pseudo);

    // Nothing selected: stop before retraining so the classifiers stay as
    // they were.
    if (sel1.empty() && sel2.empty()) {
      record_metrics(round, 0, 0, std::numeric_limits<double>::quiet_NaN());
      break;
    }

    std::unordered_map<std::int64_t, std::size_t> index;
    for (std::size_t i = 0; i < pool.size(); ++i) index.emplace(pool[i].id, i);
    auto to_examples = [&](const std::vector<PseudoLabelRecord>& sel, int view) {
      std::vector<PseudoExample> out;
      for (const auto& rec : sel) {
        out.push_back({pool[index.at(rec.instance_id)].view(view), rec.label});
      }
      return out;
    };
    auto current1 = to_examples(sel1, 1);
    auto current2 = to_examples(sel2, 2);
    std::vector<PseudoExample> train1, train2;
    if (cfg.accumulate_pseudo) {
      kept1.insert(kept1.end(), current1.begin(), current1.end());
      kept2.insert(kept2.end(), current2.begin(), current2.end());
      train1 = kept1;
      train2 = kept2;
    } else {
      train1 = std::move(current1);
      train2 = std::move(current2);
    }

    // Sequential freeze/update: view 2 sees the already-updated view 1.
    clf1 = retrain_view(clf1, clf2, ds, train1, pool, cfg, tc);
    clf2 = retrain_view(clf2, clf1, ds, train2, pool, cfg, tc);

    std::set<std::int64_t> removed;
    std::size_t correct = 0;
    for (const auto* sel : {&sel1, &sel2}) {
      for (const auto& rec : *sel) {
        removed.insert(rec.instance_id);
        if (rec.oracle_correct) ++correct;
        result.records.push_back(rec);
      }
    }
    std::erase_if(pool, [&](const Instance& inst) { return removed.contains(inst.id); });

    const double accuracy =
        static_cast<double>(correct) / static_cast<double>(sel1.size() + sel2.size());
    record_metrics(round, sel1.size(), sel2.size(), accuracy);
  }
  return result;
}

LemmaReport one_step_lemma_experiment(const Dataset& ds, const CoTrainConfig& cfg,
                                      std::size_t handicap) {
  cfg.validate();
  if (handicap == 0 || handicap > ds.labeled.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("handicap = {} must be in [1, {}] (labeled set size)", handicap,
                            ds.labeled.size()));
  }
  if (ds.test.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "lemma experiment needs a non-empty test set");
  }
  TrainConfig sup = cfg.train;
  sup.seed = cfg.seed;
  sup.lambda_agree = 0.0;

  const std::span<const Instance> subset(ds.labeled.data(), handicap);
  const auto subset_batch = examples_for_view(subset, 1);
  const auto init1 = ViewClassifier::initialize(1, ds.dim(1), sup.prob_clip, sup.seed);
  const auto clf1 = train(init1, subset_batch, {}, {}, sup);
  const auto clf2 = supervised_baseline(ds, 2, sup);

  LemmaReport report;
  report.eps1_before = evaluate_error(clf1, ds.test, 1);
  report.eps2 = evaluate_error(clf2, ds.test, 2);
  report.precondition_violated = !(report.eps2 < std::min(report.eps1_before, 0.5));

  auto batch = subset_batch;
  std::size_t correct = 0;
  for (const auto& inst : ds.unlabeled) {
    const auto pred = clf2.predict(inst.view2);
    if (!(pred.confidence > cfg.tau_pseudo)) continue;
    const Label y = pseudo_label(pred);
    batch.push_back({inst.view1, y});
    if (inst.oracle_label && *inst.oracle_label == y) ++correct;
  }
  report.pseudo_labels = batch.size() - subset_batch.size();
  if (report.pseudo_labels == 0) {
    report.eps1_after = report.eps1_before;
    report.pseudo_accuracy = std::numeric_limits<double>::quiet_NaN();
  } else {
    const auto retrained = train(clf1, batch, {}, {}, sup);
    report.eps1_after = evaluate_error(retrained, ds.test, 1);
    report.pseudo_accuracy =
        static_cast<double>(correct) / static_cast<double>(report.pseudo_labels);
  }
  report.improved = report.eps1_after < report.eps1_before;
  return report;
}

void write_trajectory_csv(std::span<const RoundMetrics> trajectory,
                          const std::filesystem::path& path) {
  csv::Writer out(path, {"round", "err_view1", "err_view2", "err_max", "disagreement",
                         "pool_size", "added_view1", "added_view2", "pseudo_accuracy"});
  for (const auto& m : trajectory) {
    out.field(m.round).field(m.err_view1).field(m.err_view2).field(m.err_max)
        .field(m.disagreement).field(m.pool_size).field(m.added_view1).field(m.added_view2)
        .field(m.pseudo_accuracy);
    out.end_row();
  }
}

void write_records_csv(std::span<const PseudoLabelRecord> records,
                       const std::filesystem::path& path) {
  csv::Writer out(path, {"round", "instance_id", "source_view", "assigned_to_view", "label",
                         "confidence", "oracle_correct"});
  for (const auto& r : records) {
    out.field(r.round).field(r.instance_id).field(r.source_view).field(r.assigned_to_view)
        .field(r.label).field(r.confidence).field(r.oracle_correct);
    out.end_row();
  }
}

}  // namespace cotrain
