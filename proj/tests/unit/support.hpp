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

// Shared fixtures for the unit tests.
#ifndef COTRAIN_TESTS_SUPPORT_HPP_
#define COTRAIN_TESTS_SUPPORT_HPP_

#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "data.hpp"

namespace cotrain::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& name)
      : path_(std::filesystem::temp_directory_path() / ("cotrain_test_" + name)) {
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline Instance make_instance(std::int64_t id, std::vector<double> v1, std::vector<double> v2,
                              Label label) {
  Instance inst;
  inst.id = id;
  inst.view1 = std::move(v1);
  inst.view2 = std::move(v2);
  inst.oracle_label = label;
  return inst;
}

inline GeneratorConfig small_config(std::uint64_t seed = 0) {
  GeneratorConfig g;
  g.dim_view1 = 5;
  g.dim_view2 = 5;
  g.latent_dim = 5;
  g.n_labeled = 20;
  g.n_unlabeled = 200;
  g.n_test = 500;
  g.seed = seed;
  return g;
}

}  // namespace cotrain::testing

#endif  // COTRAIN_TESTS_SUPPORT_HPP_
