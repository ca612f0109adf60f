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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "classifier.hpp"
#include "engine.hpp"
#include "error.hpp"
#include "support.hpp"

using namespace cotrain;
using testing::make_instance;
using testing::small_config;

namespace {

PseudoLabelRecord record(std::int64_t id, double confidence) {
  PseudoLabelRecord r;
  r.instance_id = id;
  r.confidence = confidence;
  return r;
}

CoTrainConfig fast_config() {
  CoTrainConfig c;
  c.rounds = 5;
  c.k_pseudo = 10;
  c.train.epochs = 100;
  return c;
}

}  // namespace

TEST_CASE("an unattainable threshold harvests nothing") {
  const ViewClassifier weak(1, {1e-3, 1e-3, 0.0});
  const ViewClassifier weak2(2, {1e-3, 1e-3, 0.0});
  const auto ds = generate_dataset(small_config());
  std::vector<Instance> pool;
  for (const auto& x : ds.unlabeled) {
    auto y = x;
    y.view1.resize(2);
    y.view2.resize(2);
    pool.push_back(y);
  }
  const auto h = harvest_pseudo_labels(weak, weak2, pool, 0.999);
  CHECK(h.for_view1.empty());
  CHECK(h.for_view2.empty());
}

TEST_CASE("each view teaches its peer") {
  const ViewClassifier c1(1, {10.0, 0.0});
  const ViewClassifier c2(2, {-10.0, 0.0});
  const std::vector<Instance> pool = {make_instance(4, {1.0}, {1.0}, 1)};
  const auto h = harvest_pseudo_labels(c1, c2, pool, 0.8, 3);
  REQUIRE(h.for_view1.size() == 1);
  REQUIRE(h.for_view2.size() == 1);
  CHECK(h.for_view2[0].source_view == 1);
  CHECK(h.for_view2[0].assigned_to_view == 2);
  CHECK(h.for_view2[0].label == 1);
  CHECK(h.for_view2[0].oracle_correct);
  CHECK(h.for_view1[0].source_view == 2);
  CHECK(h.for_view1[0].label == 0);
  CHECK_FALSE(h.for_view1[0].oracle_correct);
  CHECK(h.for_view1[0].round == 3);
}

TEST_CASE("harvested labels are more accurate than the harvesting view overall") {
  auto g = small_config(8);
  g.n_unlabeled = 1000;
  g.class_separation = 2.0;
  const auto ds = generate_dataset(g);
  TrainConfig tc;
  const auto c1 = supervised_baseline(ds, 1, tc);
  const auto c2 = supervised_baseline(ds, 2, tc);
  const auto h = harvest_pseudo_labels(c1, c2, ds.unlabeled, 0.8);
  REQUIRE_FALSE(h.for_view2.empty());
  // Brute force: accuracy of view 1 on the full pool versus on its confident
  // subset.
  std::size_t correct = 0;
  for (const auto& x : ds.unlabeled) correct += c1.predict(x.view1).label == *x.oracle_label;
  const double overall = static_cast<double>(correct) / static_cast<double>(ds.unlabeled.size());
  std::size_t confident_correct = 0;
  for (const auto& r : h.for_view2) confident_correct += r.oracle_correct;
  const double harvested =
      static_cast<double>(confident_correct) / static_cast<double>(h.for_view2.size());
  CHECK(harvested > overall);
}

TEST_CASE("top-k selection orders by confidence then id") {
  auto picked = select_top_k({record(1, 0.7), record(2, 0.9), record(3, 0.8)}, 2);
  REQUIRE(picked.size() == 2);
  CHECK(picked[0].instance_id == 2);
  CHECK(picked[1].instance_id == 3);

  picked = select_top_k({record(7, 0.9), record(3, 0.9)}, 1);
  REQUIRE(picked.size() == 1);
  CHECK(picked[0].instance_id == 3);

  picked = select_top_k({record(1, 0.6), record(2, 0.9)}, 10);
  CHECK(picked.size() == 2);
  CHECK_THROWS_AS(select_top_k({record(1, 0.6)}, 0), Error);
}

TEST_CASE("an empty pool stops after one round at the supervised baseline") {
  auto g = small_config();
  g.n_unlabeled = 0;
  const auto ds = generate_dataset(g);
  const auto cfg = fast_config();
  const auto r = run_cotraining(ds, cfg);
  REQUIRE(r.trajectory.size() == 2);
  CHECK(r.trajectory[0].round == 0);
  CHECK(r.trajectory[1].round == 1);
  CHECK(r.trajectory[1].added_view1 == 0);
  CHECK(r.trajectory[1].added_view2 == 0);
  CHECK(std::isnan(r.trajectory[1].pseudo_accuracy));
  CHECK(r.records.empty());
  auto tc = cfg.train;
  tc.seed = cfg.seed;
  tc.lambda_agree = cfg.lambda_agree;
  CHECK(r.clf1 == supervised_baseline(ds, 1, tc));
  CHECK(r.clf2 == supervised_baseline(ds, 2, tc));
}

TEST_CASE("no harvest without agreement equals two independent baselines") {
  auto g = small_config(4);
  g.class_separation = 0.5;
  const auto ds = generate_dataset(g);
  auto cfg = fast_config();
  cfg.tau_pseudo = 0.9999;
  cfg.lambda_agree = 0.0;
  const auto r = run_cotraining(ds, cfg);
  REQUIRE(r.trajectory.size() == 2);
  CHECK(r.trajectory[1].pool_size == ds.unlabeled.size());
  auto tc = cfg.train;
  tc.seed = cfg.seed;
  CHECK(r.clf1 == supervised_baseline(ds, 1, tc));
  CHECK(r.clf2 == supervised_baseline(ds, 2, tc));
}

TEST_CASE("co-training bookkeeping holds in both persistence modes") {
  const auto ds = generate_dataset(small_config(1));
  for (bool accumulate : {false, true}) {
    CAPTURE(accumulate);
    auto cfg = fast_config();
    cfg.accumulate_pseudo = accumulate;
    const auto r = run_cotraining(ds, cfg);
    REQUIRE(r.trajectory.size() >= 2);
    CHECK(r.trajectory.size() <= cfg.rounds + 1);
    CHECK(r.trajectory[0].pool_size == ds.unlabeled.size());
    std::set<std::int64_t> removed;
    for (std::size_t k = 1; k < r.trajectory.size(); ++k) {
      const auto& m = r.trajectory[k];
      CHECK(m.round == static_cast<int>(k));
      CHECK(m.added_view1 <= cfg.k_pseudo);
      CHECK(m.added_view2 <= cfg.k_pseudo);
      CHECK(m.err_max == std::max(m.err_view1, m.err_view2));
      CHECK(m.pool_size <= r.trajectory[k - 1].pool_size);
    }
    for (const auto& rec : r.records) {
      CHECK(rec.source_view != rec.assigned_to_view);
      CHECK(rec.confidence > cfg.tau_pseudo);
      removed.insert(rec.instance_id);
    }
    CHECK(r.trajectory.back().pool_size == ds.unlabeled.size() - removed.size());
    // Deterministic re-run.
    const auto again = run_cotraining(ds, cfg);
    CHECK(again.clf1 == r.clf1);
    CHECK(again.clf2 == r.clf2);
  }
  auto literal = fast_config();
  auto kept = literal;
  kept.accumulate_pseudo = true;
  CHECK_FALSE(run_cotraining(ds, literal).clf1 == run_cotraining(ds, kept).clf1);
}

TEST_CASE("invalid co-training settings are rejected") {
  const auto ds = generate_dataset(small_config());
  auto cfg = fast_config();
  cfg.tau_pseudo = 0.4;
  CHECK_THROWS_AS(run_cotraining(ds, cfg), Error);
  cfg = fast_config();
  cfg.rounds = 0;
  CHECK_THROWS_AS(run_cotraining(ds, cfg), Error);
  cfg = fast_config();
  cfg.k_pseudo = 0;
  CHECK_THROWS_AS(run_cotraining(ds, cfg), Error);
  cfg = fast_config();
  cfg.lambda_agree = -1.0;
  CHECK_THROWS_AS(run_cotraining(ds, cfg), Error);
}

TEST_CASE("one-step experiment without a handicap on duplicated views") {
  auto g = small_config(2);
  g.rho = 1.0;
  const auto ds = generate_dataset(g);
  const auto rep = one_step_lemma_experiment(ds, fast_config(), ds.labeled.size());
  CHECK(rep.eps1_before == rep.eps2);
  CHECK(rep.precondition_violated);
}

TEST_CASE("one-step experiment with an empty pool changes nothing") {
  auto g = small_config(2);
  g.n_unlabeled = 0;
  const auto ds = generate_dataset(g);
  const auto rep = one_step_lemma_experiment(ds, fast_config(), 5);
  CHECK(rep.eps1_after == rep.eps1_before);
  CHECK(rep.pseudo_labels == 0);
  CHECK_FALSE(rep.improved);
  CHECK_THROWS_AS(one_step_lemma_experiment(ds, fast_config(), 0), Error);
  CHECK_THROWS_AS(one_step_lemma_experiment(ds, fast_config(), ds.labeled.size() + 1), Error);
}

TEST_CASE("trajectory and record files have the documented columns") {
  testing::TempDir dir("engine_csv");
  const auto r = run_cotraining(generate_dataset(small_config()), fast_config());
  write_trajectory_csv(r.trajectory, dir / "trajectory.csv");
  write_records_csv(r.records, dir / "records.csv");
  const auto traj = testing::slurp(dir / "trajectory.csv");
  CHECK(traj.rfind("round,err_view1,err_view2,err_max,disagreement,pool_size,added_view1,"
                   "added_view2,pseudo_accuracy\n",
                   0) == 0);
  const auto recs = testing::slurp(dir / "records.csv");
  CHECK(recs.rfind("round,instance_id,source_view,assigned_to_view,label,confidence,"
                   "oracle_correct\n",
                   0) == 0);
}

TEST_CASE("confidently harvested labels beat the harvesting view's error") {
  // For each round and source view with at least 20 harvested labels, the
  // median over seeds of (pseudo accuracy - (1 - source error)) is >= 0.
  GeneratorConfig g;
  g.n_labeled = 20;
  g.n_unlabeled = 500;
  g.n_test = 2000;
  CoTrainConfig cfg;
  std::map<std::pair<int, int>, std::vector<double>> margins;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    g.seed = seed;
    cfg.seed = seed;
    const auto r = run_cotraining(generate_dataset(g), cfg);
    std::map<std::pair<int, int>, std::pair<int, int>> tally;  // (round, view) -> (ok, n)
    for (const auto& rec : r.records) {
      auto& t = tally[{rec.round, rec.source_view}];
      t.first += rec.oracle_correct;
      t.second += 1;
    }
    for (const auto& [key, t] : tally) {
      if (t.second < 20) continue;
      const auto& prev = r.trajectory[static_cast<std::size_t>(key.first - 1)];
      const double err = key.second == 1 ? prev.err_view1 : prev.err_view2;
      margins[key].push_back(static_cast<double>(t.first) / t.second - (1.0 - err));
    }
  }
  REQUIRE_FALSE(margins.empty());
  for (auto& [key, m] : margins) {
    CAPTURE(key.first);
    CAPTURE(key.second);
    std::sort(m.begin(), m.end());
    const double med = m.size() % 2 ? m[m.size() / 2] : 0.5 * (m[m.size() / 2 - 1] + m[m.size() / 2]);
    CHECK(med >= 0.0);
  }
}
