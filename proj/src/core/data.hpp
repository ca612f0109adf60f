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

// Synthetic two-view datasets.
//
// Each instance draws y ~ Bernoulli(class_balance) and a shared latent
// z ~ N(0, I_latent_dim), then for each view v
//
//   x(v) = mu_y(v) + sqrt(1 - rho) * sigma * eps_v + sqrt(rho) * A_v z
//
// with eps_v independent standard normal noise. When latent_dim is at least
// the larger view dimension the mixing rows are orthonormal scaled by sigma,
// so each view has within-class covariance sigma^2 I for any rho. With fewer
// latent factors the rows only have norm sigma. A_1 and A_2 are the leading rows of one shared matrix:
// at rho = 1 and equal dimensions both views coincide exactly, at rho = 0 they
// are conditionally independent given y.
#ifndef COTRAIN_CORE_DATA_HPP_
#define COTRAIN_CORE_DATA_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace cotrain {

using Label = int;

struct GeneratorConfig {
  std::size_t dim_view1 = 10;
  std::size_t dim_view2 = 10;
  double class_separation = 3.0;
  double noise_sigma = 1.0;
  double rho = 0.0;
  std::size_t latent_dim = 10;
  std::size_t n_labeled = 20;
  std::size_t n_unlabeled = 500;
  std::size_t n_test = 2000;
  double class_balance = 0.5;
  double shift_magnitude = 0.0;
  std::uint64_t seed = 0;

  // Throws Error(kInvalidArgument) naming the first violated bound.
  void validate() const;
};

struct Instance {
  std::int64_t id = 0;
  std::vector<double> view1;
  std::vector<double> view2;
  std::optional<Label> oracle_label;

  // view is 1 or 2.
  const std::vector<double>& view(int v) const { return v == 1 ? view1 : view2; }
};

struct Dataset {
  std::vector<Instance> labeled;
  std::vector<Instance> unlabeled;
  std::vector<Instance> test;
  GeneratorConfig config;

  std::size_t dim(int view) const;
};

Dataset generate_dataset(const GeneratorConfig& cfg);

struct DependenceStat {
  double stat = 0.0;   // mean |within-class correlation| of matched coordinates
  double indep = 1.0;  // 1 - stat
};

// Pools every partition; requires oracle labels and at least two instances
// of each class.
DependenceStat conditional_dependence_stat(const Dataset& ds);

// Translates test instances (and unlabeled ones when `shift_unlabeled`) by
// `magnitude` along a seed-derived unit direction per view.
Dataset apply_shift(const Dataset& ds, double magnitude, std::uint64_t seed,
                    bool shift_unlabeled = false);

// dataset.csv: id, partition, label (empty unless labeled), v1_*, v2_*.
// oracle.csv: id, label for every instance.
void save_dataset_csv(const Dataset& ds, const std::filesystem::path& dataset_path,
                      const std::filesystem::path& oracle_path);

// Inverse of save_dataset_csv. Only the dimensions and partition sizes of
// the returned config are meaningful.
Dataset load_dataset_csv(const std::filesystem::path& dataset_path,
                         const std::filesystem::path& oracle_path);

}  // namespace cotrain

#endif  // COTRAIN_CORE_DATA_HPP_
