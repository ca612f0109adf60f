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

// Config-driven experiment commands behind the command-line front end.
#ifndef COTRAIN_CORE_EXPERIMENT_HPP_
#define COTRAIN_CORE_EXPERIMENT_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "data.hpp"
#include "engine.hpp"
#include "theory.hpp"

namespace cotrain {

struct BoundSettings {
  double c1 = 1.0;
  double c2 = 1.0;
  double delta = 0.05;
  double d_eff = 0.0;  // 0 selects max(dim_view1, dim_view2) + 1

  double effective_d_eff(const GeneratorConfig& g) const;
};

struct SweepSpec {
  std::string parameter;
  std::vector<double> values;
};

struct FigureSettings {
  std::vector<double> fig1_lambdas = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::size_t fig1_rounds = 20;
  double fig1_c_min = 0.02;
  double fig1_eps0 = 0.45;

  std::size_t fig2_n_labeled = 100;
  double fig2_empirical_risk = 0.1;
  double fig2_disagreement = 0.1;
  double fig2_indep = 0.9;
  std::vector<std::uint64_t> fig2_n_unlabeled;  // empty selects 0, 100, ..., 10000

  double fig3_frac = 0.8;
  std::vector<double> fig3_disagreement;  // empty selects 0, 0.05, ..., 1
  std::vector<double> fig3_indep;
};

struct AuditSettings {
  std::size_t handicap = 5;
  std::size_t lemma_n_labeled = 200;
  std::size_t lemma_n_unlabeled = 1000;
  bool independence_contrast = true;
  double contrast_rho = 1.0;
  double min_improved_fraction = 0.9;
  AuditGrid grid = AuditGrid::defaults();
};

struct ExperimentConfig {
  GeneratorConfig generator;
  bool shift_unlabeled = false;
  CoTrainConfig cotrain;
  BoundSettings bound;
  std::optional<SweepSpec> sweep;
  std::vector<std::uint64_t> seeds = {0};
  std::string output_dir;
  FigureSettings figures;
  AuditSettings audit;

  void validate() const;
};

ExperimentConfig parse_experiment_config(std::string_view text, const std::string& source);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

// Sets a numeric parameter by its bare name (e.g. "rho", "k_pseudo").
void set_parameter(ExperimentConfig& cfg, const std::string& name, double value);
bool is_sweep_parameter(const std::string& name);

struct RunOptions {
  std::filesystem::path out_dir = "out";
  std::int64_t seed_offset = 0;
};

// Dataset for one run seed, shifted when the generator asks for it.
Dataset dataset_for_seed(const ExperimentConfig& cfg, std::uint64_t seed);

// Each command writes its files under opts.out_dir and a short report to
// `report`. cmd_audit returns false when a hard audit claim fails.
void cmd_generate(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& report);
void cmd_cotrain(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& report);
void cmd_figures(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& report);
bool cmd_audit(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& report);
void cmd_sweep(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& report);

// Linear-interpolation quantile (q in [0, 1]) of a non-empty sample.
double quantile(std::vector<double> values, double q);

}  // namespace cotrain

#endif  // COTRAIN_CORE_EXPERIMENT_HPP_
