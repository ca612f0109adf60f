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

#include <cmath>
#include <numbers>
#include <vector>

#include "classifier.hpp"
#include "engine.hpp"
#include "error.hpp"
#include "rng.hpp"
#include "support.hpp"

using namespace cotrain;
using testing::make_instance;

namespace {

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  const double scale = std::max({norm(a), norm(b), 1e-12});
  return norm(d) / scale;
}

template <typename Loss>
std::vector<double> central_difference(const ViewClassifier& clf, Loss loss, double h = 1e-6) {
  std::vector<double> w(clf.weights().begin(), clf.weights().end());
  std::vector<double> out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    auto plus = w, minus = w;
    plus[i] += h;
    minus[i] -= h;
    const ViewClassifier cp(clf.view_index(), plus, clf.prob_clip());
    const ViewClassifier cm(clf.view_index(), minus, clf.prob_clip());
    out[i] = (loss(cp) - loss(cm)) / (2.0 * h);
  }
  return out;
}

// Random point set whose logits stay well inside the clamp band.
struct RandomProblem {
  ViewClassifier clf;
  std::vector<std::vector<double>> xs;
  std::vector<Label> labels;
  std::vector<double> peer;
};

RandomProblem random_problem(Rng& rng) {
  for (;;) {
    const std::size_t dim = 1 + static_cast<std::size_t>(rng.uniform() * 8);
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 20);
    std::vector<double> w(dim + 1);
    for (auto& v : w) v = 0.5 * rng.normal();
    RandomProblem p{ViewClassifier(1, w), {}, {}, {}};
    bool inside = true;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> x(dim);
      for (auto& v : x) v = rng.normal();
      inside = inside && std::abs(p.clf.logit(x)) < 5.0;
      p.xs.push_back(std::move(x));
      p.labels.push_back(rng.bernoulli(0.5) ? 1 : 0);
      p.peer.push_back(0.01 + 0.98 * rng.uniform());
    }
    if (inside) return p;
  }
}

std::vector<Example> as_examples(const RandomProblem& p) {
  std::vector<Example> out;
  for (std::size_t i = 0; i < p.xs.size(); ++i) out.push_back({p.xs[i], p.labels[i]});
  return out;
}

std::vector<std::span<const double>> as_spans(const std::vector<std::vector<double>>& xs) {
  return {xs.begin(), xs.end()};
}

}  // namespace

TEST_CASE("zero weights give a coin flip labelled 1") {
  const ViewClassifier clf(1, {0.0, 0.0, 0.0});
  const std::vector<double> x = {3.0, -7.0};
  const auto p = clf.predict(x);
  CHECK(p.prob_positive == 0.5);
  CHECK(p.confidence == 0.5);
  CHECK(p.label == 1);
}

TEST_CASE("probabilities clamp at the clip level") {
  const ViewClassifier clf(2, {1e6, 0.0}, 1e-3);
  CHECK(clf.probability(std::vector<double>{1.0}) == 1.0 - 1e-3);
  CHECK(clf.probability(std::vector<double>{-1.0}) == 1e-3);
  CHECK_THROWS_AS(ViewClassifier(1, {}), Error);
  CHECK_THROWS_AS(clf.probability(std::vector<double>{1.0, 2.0}), Error);
}

TEST_CASE("hand-set weights reproduce the logistic function") {
  // logistic(2) = 1 / (1 + e^-2), evaluated independently.
  const double expected = 0.8807970779778823;
  const ViewClassifier clf(1, {1.0, 0.0, 0.0, 0.0});
  CHECK(clf.probability(std::vector<double>{2.0, 0.0, 0.0}) ==
        doctest::Approx(expected).epsilon(1e-15));
  CHECK(clf.logit(std::vector<double>{2.0, 0.0, 0.0}) == 2.0);
}

TEST_CASE("pseudo labels threshold at one half") {
  CHECK(pseudo_label({0.9, 0.9, 1}) == 1);
  CHECK(pseudo_label({0.2, 0.8, 0}) == 0);
  CHECK(pseudo_label({0.5, 0.5, 1}) == 1);
}

TEST_CASE("supervised loss at its closed-form points") {
  const double clip = 1e-3, l2 = 0.01;
  SUBCASE("confident correct predictions sit at the clamp") {
    const ViewClassifier clf(1, {100.0, 0.0}, clip);
    const std::vector<double> a = {1.0}, b = {-1.0};
    const std::vector<Example> batch = {{a, 1}, {b, 0}};
    const auto lg = supervised_loss_grad(clf, batch, l2);
    CHECK(lg.loss == doctest::Approx(-std::log(1.0 - clip) + l2 * 100.0 * 100.0));
  }
  SUBCASE("zero weights on a balanced batch") {
    const ViewClassifier clf(1, {0.0, 0.0, 0.0}, clip);
    const std::vector<double> a = {1.0, 2.0}, b = {-3.0, 0.5};
    const std::vector<Example> batch = {{a, 1}, {b, 0}};
    CHECK(supervised_loss_grad(clf, batch, l2).loss ==
          doctest::Approx(std::numbers::ln2).epsilon(1e-14));
  }
}

TEST_CASE("agreement loss closed forms") {
  // p_own = 0.7 on a single item through a one-weight model.
  const double w = std::log(0.7 / 0.3);
  const ViewClassifier clf(1, {w, 0.0});
  const std::vector<std::vector<double>> xs = {{1.0}};
  const auto spans = as_spans(xs);
  CHECK(agreement_loss_grad(clf, spans, std::vector<double>{0.2}).loss ==
        doctest::Approx(0.25).epsilon(1e-12));
  const auto same = agreement_loss_grad(clf, spans, std::vector<double>{clf.probability(xs[0])});
  CHECK(same.loss == 0.0);
  CHECK(norm(same.grad) == 0.0);
  CHECK_THROWS_AS(agreement_loss_grad(clf, spans, std::vector<double>{0.1, 0.2}), Error);
}

TEST_CASE("loss gradients match central finite differences on 100 random problems") {
  Rng rng(2024);
  double worst_sup = 0.0, worst_agree = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = random_problem(rng);
    const double l2 = 0.1 * rng.uniform();
    const auto batch = as_examples(p);
    const auto spans = as_spans(p.xs);

    const auto sup = supervised_loss_grad(p.clf, batch, l2);
    const auto sup_fd = central_difference(
        p.clf, [&](const ViewClassifier& c) { return supervised_loss_grad(c, batch, l2).loss; });
    worst_sup = std::max(worst_sup, relative_error(sup.grad, sup_fd));

    const auto agr = agreement_loss_grad(p.clf, spans, p.peer);
    const auto agr_fd = central_difference(p.clf, [&](const ViewClassifier& c) {
      return agreement_loss_grad(c, spans, p.peer).loss;
    });
    worst_agree = std::max(worst_agree, relative_error(agr.grad, agr_fd));
  }
  CHECK(worst_sup < 1e-4);
  CHECK(worst_agree < 1e-4);
}

TEST_CASE("stability threshold of a constant input") {
  // [x; 1] = [1, 1] for every row: second moment [[1,1],[1,1]], eigenvalue 2.
  const std::vector<double> x = {1.0};
  const std::vector<Example> batch = {{x, 1}, {x, 0}};
  CHECK(stability_threshold(batch, 0.0) == doctest::Approx(2.0));
  CHECK(stability_threshold(batch, 0.5) == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("agreement term with zero weight is a no-op") {
  const auto ds = generate_dataset(testing::small_config());
  const auto labeled = examples_for_view(ds.labeled, 1);
  std::vector<std::span<const double>> agree;
  std::vector<double> peer;
  for (const auto& x : ds.unlabeled) {
    agree.push_back(x.view1);
    peer.push_back(0.3);
  }
  TrainConfig tc;
  tc.lambda_agree = 0.0;
  const auto init = ViewClassifier::initialize(1, 5, tc.prob_clip, 0);
  const auto plain = train(init, labeled, {}, {}, tc);
  const auto with_inputs = train(init, labeled, agree, peer, tc);
  CHECK(plain == with_inputs);
}

TEST_CASE("training rejects zero epochs and bad rates") {
  const std::vector<double> x = {1.0};
  const std::vector<Example> batch = {{x, 1}};
  const ViewClassifier clf(1, {0.0, 0.0});
  TrainConfig tc;
  tc.epochs = 0;
  CHECK_THROWS_AS(train(clf, batch, {}, {}, tc), Error);
  tc = {};
  tc.learning_rate = 0.0;
  CHECK_THROWS_AS(train(clf, batch, {}, {}, tc), Error);
  tc = {};
  CHECK_THROWS_AS(train(clf, {}, {}, {}, tc), Error);
}

TEST_CASE("a separable 2-D set is fitted exactly") {
  Rng rng(99);
  std::vector<Instance> pts;
  while (pts.size() < 60) {
    const double a = 4.0 * rng.uniform() - 2.0, b = 4.0 * rng.uniform() - 2.0;
    const double s = a + 0.5 * b - 0.3;
    if (std::abs(s) < 0.3) continue;
    pts.push_back(make_instance(static_cast<std::int64_t>(pts.size()), {a, b}, {0.0},
                                s > 0 ? 1 : 0));
  }
  // Brute-force oracle: some direction and offset on a fine grid separates
  // the points, so zero training error is achievable by a linear rule.
  bool separable = false;
  for (int k = 0; k < 720 && !separable; ++k) {
    const double t = k * std::numbers::pi / 360.0;
    for (int m = -60; m <= 60 && !separable; ++m) {
      const double off = m * 0.05;
      bool ok = true;
      for (const auto& p : pts) {
        const double s = std::cos(t) * p.view1[0] + std::sin(t) * p.view1[1] - off;
        if ((s >= 0) != (*p.oracle_label == 1)) {
          ok = false;
          break;
        }
      }
      separable = ok;
    }
  }
  REQUIRE(separable);

  TrainConfig tc;
  tc.learning_rate = 0.5;
  tc.epochs = 200;
  const auto labeled = examples_for_view(pts, 1);
  const auto clf = train(ViewClassifier::initialize(1, 2, tc.prob_clip, 0), labeled, {}, {}, tc);
  CHECK(evaluate_error(clf, pts, 1) == 0.0);
}

TEST_CASE("error counting on constant predictors") {
  std::vector<Instance> set;
  for (int i = 0; i < 10; ++i) {
    set.push_back(make_instance(i, {static_cast<double>(i)}, {0.0}, i < 3 ? 1 : 0));
  }
  const ViewClassifier always_one(1, {0.0, 0.0});
  CHECK(evaluate_error(always_one, set, 1) == doctest::Approx(0.7));
  const ViewClassifier perfect(1, {-1.0, 2.5});
  CHECK(evaluate_error(perfect, set, 1) == 0.0);

  Rng rng(5);
  std::vector<Instance> balanced;
  for (int i = 0; i < 4000; ++i) {
    balanced.push_back(make_instance(i, {rng.normal()}, {0.0}, rng.bernoulli(0.5) ? 1 : 0));
  }
  CHECK(std::abs(evaluate_error(always_one, balanced, 1) - 0.5) < 0.03);
}

TEST_CASE("initialisation is small, seeded and view independent") {
  const auto a = ViewClassifier::initialize(1, 6, 1e-3, 42);
  const auto b = ViewClassifier::initialize(2, 6, 1e-3, 42);
  CHECK(a.weights().size() == 7);
  CHECK(std::equal(a.weights().begin(), a.weights().end(), b.weights().begin()));
  for (double w : a.weights()) CHECK(std::abs(w) < 0.06);
  const auto c = ViewClassifier::initialize(1, 6, 1e-3, 43);
  CHECK_FALSE(a == c);
}

TEST_CASE("checkpoints round trip exactly") {
  testing::TempDir dir("checkpoint");
  const ViewClassifier clf(2, {0.1, -1.0 / 3.0, 2.5e-7, 4.0}, 0.01);
  save_checkpoint(clf, dir / "clf.csv");
  CHECK(load_checkpoint(dir / "clf.csv") == clf);
  CHECK_THROWS_AS(load_checkpoint(dir / "missing.csv"), Error);
}

TEST_CASE("scaling weights up never changes a label") {
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> w(4), x(3);
    for (auto& v : w) v = rng.normal();
    for (auto& v : x) v = rng.normal();
    const ViewClassifier base(1, w);
    const double c = 1.0 + 10.0 * rng.uniform();
    for (auto& v : w) v *= c;
    const ViewClassifier scaled(1, w);
    CHECK(base.predict(x).label == scaled.predict(x).label);
  }
}
