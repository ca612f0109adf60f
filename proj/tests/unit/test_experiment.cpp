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
#include <map>
#include <sstream>

#include "csv.hpp"
#include "error.hpp"
#include "experiment.hpp"
#include "support.hpp"

using namespace cotrain;
using testing::TempDir;
using testing::slurp;

namespace fs = std::filesystem;

namespace {

ExperimentConfig quick(std::size_t n_seeds = 2) {
  ExperimentConfig cfg;
  cfg.generator.dim_view1 = 4;
  cfg.generator.dim_view2 = 4;
  cfg.generator.latent_dim = 4;
  cfg.generator.n_labeled = 12;
  cfg.generator.n_unlabeled = 120;
  cfg.generator.n_test = 200;
  cfg.cotrain.rounds = 4;
  cfg.cotrain.k_pseudo = 10;
  cfg.cotrain.train.epochs = 60;
  cfg.seeds.clear();
  for (std::size_t i = 0; i < n_seeds; ++i) cfg.seeds.push_back(i);
  cfg.audit.lemma_n_labeled = 40;
  cfg.audit.lemma_n_unlabeled = 100;
  return cfg;
}

RunOptions at(const fs::path& dir, std::int64_t offset = 0) {
  RunOptions o;
  o.out_dir = dir;
  o.seed_offset = offset;
  return o;
}

std::vector<double> column(const csv::Table& t, const std::string& name) {
  std::vector<double> out;
  const auto c = t.column(name);
  for (const auto& row : t.rows) out.push_back(csv::parse_real(row[c], name));
  return out;
}

}  // namespace

TEST_CASE("quantiles interpolate linearly") {
  CHECK(quantile({3.0, 1.0, 2.0}, 0.5) == 2.0);
  CHECK(quantile({1.0, 2.0, 3.0, 4.0}, 0.5) == 2.5);
  CHECK(quantile({1.0, 2.0, 3.0, 4.0, 5.0}, 0.25) == 2.0);
  CHECK_THROWS_AS(quantile({}, 0.5), Error);
}

TEST_CASE("generate writes both files and is reproducible") {
  TempDir dir("cmd_generate");
  std::ostringstream report;
  const auto cfg = quick();
  cmd_generate(cfg, at(dir / "a"), report);
  cmd_generate(cfg, at(dir / "b"), report);
  CHECK(fs::exists(dir / "a/dataset.csv"));
  CHECK(fs::exists(dir / "a/oracle.csv"));
  CHECK(slurp(dir / "a/dataset.csv") == slurp(dir / "b/dataset.csv"));
  CHECK(slurp(dir / "a/oracle.csv") == slurp(dir / "b/oracle.csv"));
  CHECK(report.str().find("labeled 12 unlabeled 120 test 200") != std::string::npos);
  CHECK(report.str().find("conditional dependence stat") != std::string::npos);

  cmd_generate(cfg, at(dir / "c", 1), report);
  CHECK(slurp(dir / "a/dataset.csv") != slurp(dir / "c/dataset.csv"));
}

TEST_CASE("cotrain writes one directory per seed and a summary") {
  TempDir dir("cmd_cotrain");
  std::ostringstream report;
  const auto cfg = quick(20);
  cmd_cotrain(cfg, at(dir.path()), report);
  std::size_t trajectories = 0;
  for (const auto& e : fs::directory_iterator(dir.path())) {
    if (e.is_directory() && fs::exists(e.path() / "trajectory.csv")) {
      ++trajectories;
      CHECK(fs::exists(e.path() / "records.csv"));
      CHECK(fs::exists(e.path() / "clf1.csv"));
      CHECK(fs::exists(e.path() / "clf2.csv"));
    }
  }
  CHECK(trajectories == 20);
  const auto summary = csv::read(dir / "summary.csv");
  CHECK(summary.rows.size() == cfg.cotrain.rounds + 1);
  CHECK(column(summary, "n_seeds")[0] == 20.0);
  const auto fit = csv::read(dir / "contraction_fit.csv");
  CHECK(fit.rows.size() == 1);

  const auto traj = csv::read(dir / "seed_0/trajectory.csv");
  const auto bound = column(traj, "bound");
  const auto emp = column(traj, "empirical_risk");
  const auto comp = column(traj, "complexity_term");
  const auto gam = column(traj, "gamma");
  const auto conf = column(traj, "confidence_term");
  for (std::size_t i = 0; i < bound.size(); ++i) {
    CHECK(std::abs(emp[i] + comp[i] - gam[i] + conf[i] - bound[i]) < 1e-12);
  }
}

TEST_CASE("cotrain output is byte-identical across runs") {
  TempDir dir("cmd_cotrain_rerun");
  std::ostringstream report;
  const auto cfg = quick(2);
  cmd_cotrain(cfg, at(dir / "a"), report);
  cmd_cotrain(cfg, at(dir / "b"), report);
  for (const auto& e : fs::recursive_directory_iterator(dir / "a")) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), dir / "a");
    CAPTURE(rel.string());
    CHECK(slurp(e.path()) == slurp(dir / "b" / rel));
  }
}

TEST_CASE("an empty pool gives two-row trajectories") {
  TempDir dir("cmd_cotrain_empty");
  std::ostringstream report;
  auto cfg = quick(3);
  cfg.generator.n_unlabeled = 0;
  cmd_cotrain(cfg, at(dir.path()), report);
  for (auto seed : cfg.seeds) {
    const auto t = csv::read(dir / ("seed_" + std::to_string(seed)) / "trajectory.csv");
    CHECK(column(t, "round") == std::vector<double>{0.0, 1.0});
  }
}

TEST_CASE("bound columns are NaN when the labelled set is too small") {
  TempDir dir("cmd_cotrain_small");
  std::ostringstream report;
  auto cfg = quick(1);
  cfg.generator.n_labeled = 4;  // d_eff = 5
  cmd_cotrain(cfg, at(dir.path()), report);
  const auto t = csv::read(dir / "seed_0/trajectory.csv");
  for (double b : column(t, "bound")) CHECK(std::isnan(b));
}

TEST_CASE("figure tables have the documented shapes") {
  TempDir dir("cmd_figures");
  std::ostringstream report;
  ExperimentConfig cfg;
  cmd_figures(cfg, at(dir.path()), report);

  const auto fig1 = csv::read(dir / "fig1.csv");
  CHECK(fig1.header == std::vector<std::string>{"lambda", "round", "eps_max"});
  std::map<std::pair<double, double>, double> eps;
  for (const auto& row : fig1.rows) {
    eps[{csv::parse_real(row[0], "lambda"), csv::parse_real(row[1], "round")}] =
        csv::parse_real(row[2], "eps");
  }
  CHECK(fig1.rows.size() == 9 * 21);
  for (int k = 1; k <= 20; ++k) CHECK(eps[{0.9, k}] > eps[{0.1, k}]);
  const double c = cfg.figures.fig1_c_min;
  for (double lambda : cfg.figures.fig1_lambdas) {
    const double fixed = c / (1.0 - lambda);
    for (int k = 1; k <= 20; ++k) {
      const double before = std::abs(eps[{lambda, k - 1}] - fixed);
      const double now = std::abs(eps[{lambda, k}] - fixed);
      if (before > 1e-15) {
        CHECK(now < before);
      } else {
        CHECK(now <= 1e-15);
      }
    }
  }

  const auto fig2 = csv::read(dir / "fig2.csv");
  CHECK(fig2.header == std::vector<std::string>{"n_unlabeled", "gamma", "bound",
                                                "complexity_term", "confidence_term"});
  const auto bound = column(fig2, "bound");
  CHECK(bound.size() == 101);
  for (std::size_t i = 1; i < bound.size(); ++i) CHECK(bound[i] < bound[i - 1]);

  const auto fig3 = csv::read(dir / "fig3.csv");
  CHECK(fig3.header == std::vector<std::string>{"disagreement", "indep", "gamma"});
  const auto d = column(fig3, "disagreement"), in = column(fig3, "indep"),
             g = column(fig3, "gamma");
  std::size_t best = 0;
  for (std::size_t i = 1; i < g.size(); ++i) {
    if (g[i] > g[best]) best = i;
  }
  CHECK(g[best] == cfg.figures.fig3_frac);
  CHECK(d[best] == 0.0);
  CHECK(in[best] == 1.0);
}

TEST_CASE("audit writes its reports and passes on the default grid") {
  TempDir dir("cmd_audit");
  std::ostringstream report;
  const auto cfg = quick(3);
  CHECK(cmd_audit(cfg, at(dir.path()), report));
  for (const char* f : {"audit.csv", "report.csv", "lemma.csv", "initial_quality.csv"}) {
    CHECK(fs::exists(dir / f));
  }
  const auto audit = csv::read(dir / "audit.csv");
  CHECK(audit.header ==
        std::vector<std::string>{"claim", "axis", "grid_point", "difference", "sign_ok"});
  const auto lemma = csv::read(dir / "lemma.csv");
  CHECK(lemma.rows.size() == 6);  // three seeds at rho and at the contrast rho
  const auto rep = csv::read(dir / "report.csv");
  bool has_contrast = false;
  for (const auto& row : rep.rows) has_contrast |= row[0].starts_with("independence_contrast");
  CHECK(has_contrast);
}

TEST_CASE("audit rejects an invalid grid") {
  TempDir dir("cmd_audit_fail");
  std::ostringstream report;
  auto cfg = quick(1);
  cfg.audit.independence_contrast = false;
  cfg.audit.grid.frac = {-0.1, 0.5, 0.9};
  CHECK_THROWS_AS(cmd_audit(cfg, at(dir.path()), report), Error);
}

TEST_CASE("sweep namespaces each value") {
  TempDir dir("cmd_sweep");
  std::ostringstream report;
  auto cfg = quick(2);
  cfg.sweep = SweepSpec{"rho", {0.0, 1.0}};
  cmd_sweep(cfg, at(dir.path()), report);
  CHECK(fs::exists(dir / "rho=0/summary.csv"));
  CHECK(fs::exists(dir / "rho=1/summary.csv"));
  const auto s = csv::read(dir / "sweep_summary.csv");
  CHECK(s.rows.size() == 2 * (cfg.cotrain.rounds + 1));
  cfg.sweep.reset();
  CHECK_THROWS_AS(cmd_sweep(cfg, at(dir.path()), report), Error);
}
