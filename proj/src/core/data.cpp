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

#include "data.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include <fmt/format.h>

#include "csv.hpp"
#include "error.hpp"
#include "rng.hpp"

namespace cotrain {

void GeneratorConfig::validate() const {
  auto reject = [](const char* field, const std::string& why) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("{} {}", field, why), field);
  };
  if (dim_view1 == 0) reject("dim_view1", "must be a positive integer");
  if (dim_view2 == 0) reject("dim_view2", "must be a positive integer");
  if (latent_dim == 0) reject("latent_dim", "must be a positive integer");
  if (!(class_separation > 0.0) || !std::isfinite(class_separation)) {
    reject("class_separation", fmt::format("= {} must be a positive real", class_separation));
  }
  if (!(noise_sigma > 0.0) || !std::isfinite(noise_sigma)) {
    reject("noise_sigma", fmt::format("= {} must be a positive real", noise_sigma));
  }
  if (!(rho >= 0.0 && rho <= 1.0)) {
    reject("rho", fmt::format("= {} is outside [0, 1]", rho));
  }
  if (n_test < 1) reject("n_test", "must be at least 1");
  if (!(class_balance > 0.0 && class_balance < 1.0)) {
    reject("class_balance", fmt::format("= {} is outside (0, 1)", class_balance));
  }
  if (!(shift_magnitude >= 0.0) || !std::isfinite(shift_magnitude)) {
    reject("shift_magnitude", fmt::format("= {} must be non-negative", shift_magnitude));
  }
}

std::size_t Dataset::dim(int view) const {
  return view == 1 ? config.dim_view1 : config.dim_view2;
}

namespace {

// max(d1, d2) x latent_dim. When latent_dim >= max(d1, d2) the rows are
// orthonormal times sigma, so each view's within-class covariance is exactly
// sigma^2 I for every rho. Otherwise rows are only normalised to norm sigma.
std::vector<std::vector<double>> mixing_matrix(const GeneratorConfig& cfg) {
  Rng rng(cfg.seed, Stream::kMixingMatrix);
  const std::size_t rows = std::max(cfg.dim_view1, cfg.dim_view2);
  const bool orthonormal = cfg.latent_dim >= rows;
  std::vector<std::vector<double>> a(rows, std::vector<double>(cfg.latent_dim));
  for (std::size_t r = 0; r < rows; ++r) {
    auto& row = a[r];
    for (double& v : row) v = rng.normal();
    if (orthonormal) {
      // Modified Gram-Schmidt against the previous (unit) rows.
      for (std::size_t q = 0; q < r; ++q) {
        double dot = 0.0;
        for (std::size_t j = 0; j < row.size(); ++j) dot += row[j] * a[q][j];
        for (std::size_t j = 0; j < row.size(); ++j) row[j] -= dot * a[q][j];
      }
    }
    double norm2 = 0.0;
    for (double v : row) norm2 += v * v;
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& v : row) v *= inv;
  }
  for (auto& row : a) {
    for (double& v : row) v *= cfg.noise_sigma;
  }
  return a;
}

std::vector<double> sample_view(Rng& rng, std::size_t dim, Label y, std::span<const double> z,
                                const std::vector<std::vector<double>>& a,
                                const GeneratorConfig& cfg) {
  // Class means at -/+ separation/2 along the normalised all-ones direction.
  const double offset = (y == 1 ? 0.5 : -0.5) * cfg.class_separation /
                        std::sqrt(static_cast<double>(dim));
  const double own = std::sqrt(1.0 - cfg.rho) * cfg.noise_sigma;
  const double shared = std::sqrt(cfg.rho);
  std::vector<double> x(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    double latent = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) latent += a[i][j] * z[j];
    x[i] = offset + own * rng.normal() + shared * latent;
  }
  return x;
}

}  // namespace

Dataset generate_dataset(const GeneratorConfig& cfg) {
  cfg.validate();
  const auto a = mixing_matrix(cfg);
  Rng rng(cfg.seed, Stream::kInstances);

  Dataset ds;
  ds.config = cfg;
  const std::size_t total = cfg.n_labeled + cfg.n_unlabeled + cfg.n_test;
  std::vector<double> z(cfg.latent_dim);
  for (std::size_t n = 0; n < total; ++n) {
    Instance inst;
    inst.id = static_cast<std::int64_t>(n);
    const Label y = rng.bernoulli(cfg.class_balance) ? 1 : 0;
    for (double& v : z) v = rng.normal();
    inst.view1 = sample_view(rng, cfg.dim_view1, y, z, a, cfg);
    inst.view2 = sample_view(rng, cfg.dim_view2, y, z, a, cfg);
    inst.oracle_label = y;
    if (n < cfg.n_labeled) {
      ds.labeled.push_back(std::move(inst));
    } else if (n < cfg.n_labeled + cfg.n_unlabeled) {
      ds.unlabeled.push_back(std::move(inst));
    } else {
      ds.test.push_back(std::move(inst));
    }
  }
  return ds;
}

namespace {

double pearson(std::span<const double> a, std::span<const double> b) {
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa <= 0.0 || sbb <= 0.0) {
    throw Error(ErrorCode::kNumeric, "correlation undefined for a constant coordinate");
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

DependenceStat conditional_dependence_stat(const Dataset& ds) {
  const std::size_t paired = std::min(ds.dim(1), ds.dim(2));
  // by_class[y][coordinate] -> (view1 values, view2 values)
  std::vector<std::vector<double>> v1[2], v2[2];
  for (int y = 0; y < 2; ++y) {
    v1[y].resize(paired);
    v2[y].resize(paired);
  }
  std::size_t count[2] = {0, 0};
  auto add = [&](const std::vector<Instance>& part) {
    for (const auto& inst : part) {
      if (!inst.oracle_label) {
        throw Error(ErrorCode::kInvalidArgument,
                    fmt::format("instance {} has no oracle label", inst.id));
      }
      const int y = *inst.oracle_label;
      ++count[y];
      for (std::size_t i = 0; i < paired; ++i) {
        v1[y][i].push_back(inst.view1[i]);
        v2[y][i].push_back(inst.view2[i]);
      }
    }
  };
  add(ds.labeled);
  add(ds.unlabeled);
  add(ds.test);
  for (int y = 0; y < 2; ++y) {
    if (count[y] < 2) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("insufficient sample: class {} has {} instance(s), need 2", y,
                              count[y]));
    }
  }
  double sum = 0.0;
  for (int y = 0; y < 2; ++y) {
    for (std::size_t i = 0; i < paired; ++i) sum += std::abs(pearson(v1[y][i], v2[y][i]));
  }
  DependenceStat out;
  out.stat = std::clamp(sum / static_cast<double>(2 * paired), 0.0, 1.0);
  out.indep = 1.0 - out.stat;
  return out;
}

Dataset apply_shift(const Dataset& ds, double magnitude, std::uint64_t seed,
                    bool shift_unlabeled) {
  if (!(magnitude >= 0.0) || !std::isfinite(magnitude)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("shift magnitude = {} must be non-negative", magnitude));
  }
  Dataset out = ds;
  if (magnitude == 0.0) return out;

  Rng rng(seed, Stream::kShiftDirection);
  auto unit = [&rng](std::size_t dim) {
    std::vector<double> u(dim);
    double norm2 = 0.0;
    for (double& v : u) {
      v = rng.normal();
      norm2 += v * v;
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& v : u) v *= inv;
    return u;
  };
  const auto u1 = unit(ds.dim(1));
  const auto u2 = unit(ds.dim(2));
  auto translate = [&](std::vector<Instance>& part) {
    for (auto& inst : part) {
      for (std::size_t i = 0; i < u1.size(); ++i) inst.view1[i] += magnitude * u1[i];
      for (std::size_t i = 0; i < u2.size(); ++i) inst.view2[i] += magnitude * u2[i];
    }
  };
  translate(out.test);
  if (shift_unlabeled) translate(out.unlabeled);
  return out;
}

void save_dataset_csv(const Dataset& ds, const std::filesystem::path& dataset_path,
                      const std::filesystem::path& oracle_path) {
  std::vector<std::string> header = {"id", "partition", "label"};
  for (std::size_t i = 0; i < ds.dim(1); ++i) header.push_back(fmt::format("v1_{}", i));
  for (std::size_t i = 0; i < ds.dim(2); ++i) header.push_back(fmt::format("v2_{}", i));
  csv::Writer data(dataset_path, header);
  csv::Writer oracle(oracle_path, {"id", "label"});

  auto emit = [&](const std::vector<Instance>& part, std::string_view name, bool visible) {
    for (const auto& inst : part) {
      data.field(inst.id).field(name);
      if (visible && inst.oracle_label) {
        data.field(static_cast<std::int64_t>(*inst.oracle_label));
      } else {
        data.field(std::string_view());
      }
      for (double v : inst.view1) data.field(v);
      for (double v : inst.view2) data.field(v);
      data.end_row();
      oracle.field(inst.id);
      if (inst.oracle_label) {
        oracle.field(static_cast<std::int64_t>(*inst.oracle_label));
      } else {
        oracle.field(std::string_view());
      }
      oracle.end_row();
    }
  };
  emit(ds.labeled, "labeled", true);
  emit(ds.unlabeled, "unlabeled", false);
  emit(ds.test, "test", false);
}

Dataset load_dataset_csv(const std::filesystem::path& dataset_path,
                         const std::filesystem::path& oracle_path) {
  const auto data = csv::read(dataset_path);
  const auto oracle = csv::read(oracle_path);

  std::map<std::int64_t, Label> labels;
  const std::size_t oid = oracle.column("id"), olabel = oracle.column("label");
  for (const auto& row : oracle.rows) {
    if (row[olabel].empty()) continue;
    const auto id = csv::parse_int(row[oid], oracle_path.string());
    const auto y = csv::parse_int(row[olabel], oracle_path.string());
    if (y != 0 && y != 1) {
      throw Error(ErrorCode::kIo, fmt::format("{}: label {} is not 0 or 1",
                                              oracle_path.string(), y));
    }
    labels[id] = static_cast<Label>(y);
  }

  std::size_t d1 = 0, d2 = 0;
  for (const auto& name : data.header) {
    if (name.starts_with("v1_")) ++d1;
    if (name.starts_with("v2_")) ++d2;
  }
  if (d1 == 0 || d2 == 0) {
    throw Error(ErrorCode::kIo, fmt::format("'{}' lacks v1_*/v2_* columns",
                                            dataset_path.string()));
  }
  const std::size_t cid = data.column("id"), cpart = data.column("partition");
  const std::size_t c1 = data.column("v1_0"), c2 = data.column("v2_0");

  Dataset ds;
  ds.config.dim_view1 = d1;
  ds.config.dim_view2 = d2;
  for (const auto& row : data.rows) {
    Instance inst;
    inst.id = csv::parse_int(row[cid], dataset_path.string());
    for (std::size_t i = 0; i < d1; ++i) {
      inst.view1.push_back(csv::parse_real(row[c1 + i], dataset_path.string()));
    }
    for (std::size_t i = 0; i < d2; ++i) {
      inst.view2.push_back(csv::parse_real(row[c2 + i], dataset_path.string()));
    }
    if (auto it = labels.find(inst.id); it != labels.end()) inst.oracle_label = it->second;
    const auto& part = row[cpart];
    if (part == "labeled") {
      ds.labeled.push_back(std::move(inst));
    } else if (part == "unlabeled") {
      ds.unlabeled.push_back(std::move(inst));
    } else if (part == "test") {
      ds.test.push_back(std::move(inst));
    } else {
      throw Error(ErrorCode::kIo,
                  fmt::format("{}: unknown partition '{}'", dataset_path.string(), part));
    }
  }
  ds.config.n_labeled = ds.labeled.size();
  ds.config.n_unlabeled = ds.unlabeled.size();
  ds.config.n_test = ds.test.size();
  return ds;
}

}  // namespace cotrain
