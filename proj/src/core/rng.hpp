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

// Reproducible random streams.
//
// Every random quantity in the library is drawn from a std::mt19937_64
// engine (fully specified by the C++ standard, so its output sequence is
// identical on every conforming platform). Engines are seeded through
// SplitMix64 applied to (seed, stream tag) so that independent consumers of
// one user seed never share a sequence. Uniforms use the top 53 bits of each
// draw; normals use the Box-Muller transform. std::*_distribution is avoided
// on purpose: its algorithms are implementation-defined.
#ifndef COTRAIN_CORE_RNG_HPP_
#define COTRAIN_CORE_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>

namespace cotrain {

// Stream tags. Values are part of the reproducibility contract.
enum class Stream : std::uint64_t {
  kMixingMatrix = 1,
  kInstances = 2,
  kShiftDirection = 3,
  kClassifierInit = 4,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, Stream stream) {
  return splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(stream));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, Stream stream) : engine_(derive_seed(seed, stream)) {}

  // Uniform on the open interval (0, 1).
  double uniform() {
    const std::uint64_t bits = engine_() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

  double normal() {
    if (spare_) {
      const double v = *spare_;
      spare_.reset();
      return v;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    return r * std::cos(theta);
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

}  // namespace cotrain

#endif  // COTRAIN_CORE_RNG_HPP_
