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

// Closed-form and statistical checks on co-training theory: the unlabeled
// benefit term, the PAC-style bound, the error-contraction recursion and its
// least-squares fit, and finite-difference monotonicity audits.
#ifndef COTRAIN_CORE_THEORY_HPP_
#define COTRAIN_CORE_THEORY_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "classifier.hpp"
#include "data.hpp"

namespace cotrain {

// Fraction of instances on which the two views' labels differ.
double disagreement_rate(const ViewClassifier& clf1, const ViewClassifier& clf2,
                         std::span<const Instance> instances);

struct GammaInputs {
  double frac = 0.0;          // N_U / (N_L + N_U)
  double disagreement = 0.0;  // d(h1, h2)
  double indep = 1.0;

  void validate() const;
};

// frac * (1 - disagreement) * indep
double gamma(const GammaInputs& g);

struct BoundInputs {
  double empirical_risk = 0.0;
  std::size_t n_labeled = 1;
  std::size_t n_unlabeled = 0;
  double d_eff = 1.0;
  double delta = 0.05;
  double c1 = 1.0;
  double c2 = 1.0;
  GammaInputs gamma_inputs;

  void validate() const;
};

struct BoundReport {
  double empirical_risk_term = 0.0;
  double complexity_term = 0.0;
  double gamma_term = 0.0;  // subtracted
  double confidence_term = 0.0;
  double bound = 0.0;       // not clamped
  std::string provenance;
};

BoundReport generalization_bound(const BoundInputs& b);

// [eps0, eps1, ..., eps_rounds] with eps_{k+1} = lambda * eps_k + c_min.
std::vector<double> simulate_recursion(double lambda, double c_min, double eps0,
                                       std::size_t rounds);

struct ContractionFit {
  double lambda_hat = 0.0;
  double c_min_hat = 0.0;
  double alpha_hat = 0.0;  // 1 - lambda_hat
  double r_squared = 0.0;
  bool lambda_in_unit_interval = false;
};

// OLS of eps_{k+1} on eps_k over consecutive pairs.
ContractionFit fit_contraction(std::span<const double> trajectory);

struct AuditGrid {
  std::vector<double> frac;
  std::vector<double> disagreement;
  std::vector<double> indep;
  std::vector<std::size_t> n_unlabeled;
  // Fixed inputs for the bound evaluations.
  std::size_t n_labeled = 100;
  double empirical_risk = 0.1;
  double d_eff = 11.0;
  double delta = 0.05;
  double c1 = 1.0;
  double c2 = 1.0;
  double nu_disagreement = 0.1;  // d and indep held fixed along the N_U axis
  double nu_indep = 0.9;
  std::size_t n_unlabeled_fixed = 1000;  // N_U held fixed along d / indep

  static AuditGrid defaults();
};

struct AuditRow {
  std::string claim;
  std::string axis;
  std::string grid_point;
  double difference = 0.0;
  bool sign_ok = true;
  bool vacuous = false;
};

enum class ClaimStatus { kPass, kFail, kVacuous };

struct ClaimSummary {
  std::string claim;
  ClaimStatus status = ClaimStatus::kPass;
  std::size_t checked = 0;
  std::size_t violations = 0;
  std::optional<std::string> first_counterexample;
};

struct AuditReport {
  std::vector<AuditRow> rows;
  std::vector<ClaimSummary> claims;

  bool passed() const;
  const ClaimSummary& claim(const std::string& name) const;
};

AuditReport monotonicity_audit(const AuditGrid& grid);

std::string to_string(ClaimStatus s);

}  // namespace cotrain

#endif  // COTRAIN_CORE_THEORY_HPP_
