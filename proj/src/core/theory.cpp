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

#include "theory.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <fmt/format.h>

#include "error.hpp"

namespace cotrain {

double disagreement_rate(const ViewClassifier& clf1, const ViewClassifier& clf2,
                         std::span<const Instance> instances) {
  if (instances.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "disagreement rate needs at least one instance");
  }
  std::size_t differ = 0;
  for (const auto& inst : instances) {
    const Label a = clf1.predict(inst.view(clf1.view_index())).label;
    const Label b = clf2.predict(inst.view(clf2.view_index())).label;
    if (a != b) ++differ;
  }
  return static_cast<double>(differ) / static_cast<double>(instances.size());
}

namespace {

void require_unit(double v, const char* field) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("{} = {} is outside [0, 1]", field, v),
                field);
  }
}

}  // namespace

void GammaInputs::validate() const {
  require_unit(frac, "frac");
  require_unit(disagreement, "disagreement");
  require_unit(indep, "indep");
}

double gamma(const GammaInputs& g) {
  g.validate();
  return g.frac * (1.0 - g.disagreement) * g.indep;
}

void BoundInputs::validate() const {
  require_unit(empirical_risk, "empirical_risk");
  if (!(d_eff > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("d_eff = {} must be positive", d_eff),
                "d_eff");
  }
  if (!(static_cast<double>(n_labeled) > d_eff)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("n_labeled = {} must exceed d_eff = {}: the complexity term "
                            "d_eff * ln(n_labeled / d_eff) is only meaningful above it",
                            n_labeled, d_eff),
                "n_labeled");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("delta = {} is outside (0, 1)", delta),
                "delta");
  }
  if (!(c1 > 0.0)) throw Error(ErrorCode::kInvalidArgument, "c1 must be positive", "c1");
  if (!(c2 > 0.0)) throw Error(ErrorCode::kInvalidArgument, "c2 must be positive", "c2");
  gamma_inputs.validate();
}

BoundReport generalization_bound(const BoundInputs& b) {
  b.validate();
  const double nl = static_cast<double>(b.n_labeled);
  const double total = nl + static_cast<double>(b.n_unlabeled);
  const double log_inv_delta = std::log(1.0 / b.delta);

  BoundReport r;
  r.empirical_risk_term = b.empirical_risk;
  r.complexity_term = b.c1 * std::sqrt((b.d_eff * std::log(nl / b.d_eff) + log_inv_delta) / nl);
  r.gamma_term = gamma(b.gamma_inputs);
  r.confidence_term = b.c2 * std::sqrt(log_inv_delta / total);
  r.bound = r.empirical_risk_term + r.complexity_term - r.gamma_term + r.confidence_term;
  r.provenance =
      "gamma = frac * (1 - disagreement) * indep; indep is the proxy "
      "1 - mean |within-class cross-view correlation|";
  return r;
}

std::vector<double> simulate_recursion(double lambda, double c_min, double eps0,
                                       std::size_t rounds) {
  if (!(lambda >= 0.0 && lambda < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("lambda = {} is outside [0, 1)", lambda));
  }
  if (!(c_min >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("c_min = {} must be >= 0", c_min));
  }
  require_unit(eps0, "eps0");
  std::vector<double> eps{eps0};
  eps.reserve(rounds + 1);
  for (std::size_t k = 0; k < rounds; ++k) eps.push_back(lambda * eps.back() + c_min);
  return eps;
}

ContractionFit fit_contraction(std::span<const double> trajectory) {
  if (trajectory.size() < 3) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("contraction fit needs at least 3 points, got {}", trajectory.size()));
  }
  const auto x = trajectory.first(trajectory.size() - 1);
  const auto y = trajectory.subspan(1);
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  const bool constant = std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; });
  if (constant || !(sxx > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "contraction fit: predictor has zero variance");
  }
  ContractionFit fit;
  fit.lambda_hat = sxy / sxx;
  fit.c_min_hat = my - fit.lambda_hat * mx;
  fit.alpha_hat = 1.0 - fit.lambda_hat;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.lambda_hat * x[i] + fit.c_min_hat);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  fit.lambda_in_unit_interval = fit.lambda_hat > 0.0 && fit.lambda_hat < 1.0;
  return fit;
}

AuditGrid AuditGrid::defaults() {
  AuditGrid g;
  for (int i = 1; i <= 9; ++i) {
    g.frac.push_back(i / 10.0);
    g.disagreement.push_back(i / 10.0);
    g.indep.push_back(i / 10.0);
  }
  for (std::size_t nu = 0; nu <= 10000; nu += 100) g.n_unlabeled.push_back(nu);
  return g;
}

bool AuditReport::passed() const {
  return std::none_of(claims.begin(), claims.end(),
                      [](const ClaimSummary& c) { return c.status == ClaimStatus::kFail; });
}

const ClaimSummary& AuditReport::claim(const std::string& name) const {
  for (const auto& c : claims) {
    if (c.claim == name) return c;
  }
  throw Error(ErrorCode::kInvalidArgument, fmt::format("no audit claim named '{}'", name));
}

std::string to_string(ClaimStatus s) {
  switch (s) {
    case ClaimStatus::kPass: return "pass";
    case ClaimStatus::kFail: return "fail";
    case ClaimStatus::kVacuous: return "vacuous (zero face)";
  }
  return "unknown";
}

namespace {

// An axis of length 1 is held fixed; otherwise it must be strictly
// increasing with at least three points.
void check_axis(const std::vector<double>& axis, const char* name, bool unit) {
  if (axis.empty()) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("audit axis '{}' is empty", name));
  }
  if (axis.size() == 2) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("audit axis '{}' needs one fixed point or at least 3 points", name));
  }
  for (std::size_t i = 0; i < axis.size(); ++i) {
    if (unit) require_unit(axis[i], name);
    if (i > 0 && !(axis[i] > axis[i - 1])) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("audit axis '{}' must be strictly increasing", name));
    }
  }
}

class ClaimBuilder {
 public:
  ClaimBuilder(AuditReport& report, std::string claim, std::string axis, int expected_sign)
      : report_(report), expected_sign_(expected_sign) {
    summary_.claim = std::move(claim);
    axis_ = std::move(axis);
  }

  // `vacuous` marks points on a zero face where the claim says nothing.
  void check(const std::string& point, double difference, bool vacuous) {
    AuditRow row{summary_.claim, axis_, point, difference, true, vacuous};
    if (!vacuous) {
      ++summary_.checked;
      row.sign_ok = expected_sign_ > 0 ? difference > 0.0 : difference < 0.0;
      if (!row.sign_ok) {
        ++summary_.violations;
        if (!summary_.first_counterexample) {
          summary_.first_counterexample = fmt::format("{} (difference {:.6g})", point, difference);
        }
      }
    }
    report_.rows.push_back(std::move(row));
  }

  void finish() {
    if (summary_.violations > 0) {
      summary_.status = ClaimStatus::kFail;
    } else if (summary_.checked == 0) {
      summary_.status = ClaimStatus::kVacuous;
    } else {
      summary_.status = ClaimStatus::kPass;
    }
    report_.claims.push_back(std::move(summary_));
  }

 private:
  AuditReport& report_;
  int expected_sign_;
  ClaimSummary summary_;
  std::string axis_;
};

}  // namespace

AuditReport monotonicity_audit(const AuditGrid& grid) {
  check_axis(grid.frac, "frac", true);
  check_axis(grid.disagreement, "disagreement", true);
  check_axis(grid.indep, "indep", true);
  std::vector<double> nu(grid.n_unlabeled.begin(), grid.n_unlabeled.end());
  check_axis(nu, "n_unlabeled", false);
  if (grid.frac.size() == 1 && grid.disagreement.size() == 1 && grid.indep.size() == 1) {
    throw Error(ErrorCode::kInvalidArgument, "audit grid varies none of frac, disagreement, indep");
  }

  AuditReport report;
  const auto g = [](double f, double d, double i) { return gamma({f, d, i}); };

  {
    ClaimBuilder c(report, "gamma_increasing_in_frac", "frac", +1);
    if (grid.frac.size() > 1) {
      for (double d : grid.disagreement) {
        for (double in : grid.indep) {
          for (std::size_t k = 1; k < grid.frac.size(); ++k) {
            const double a = grid.frac[k - 1], b = grid.frac[k];
            c.check(fmt::format("frac={}->{} d={} indep={}", a, b, d, in),
                    g(b, d, in) - g(a, d, in), (1.0 - d) * in == 0.0);
          }
        }
      }
    }
    c.finish();
  }
  {
    ClaimBuilder c(report, "gamma_decreasing_in_disagreement", "disagreement", -1);
    if (grid.disagreement.size() > 1) {
      for (double f : grid.frac) {
        for (double in : grid.indep) {
          for (std::size_t k = 1; k < grid.disagreement.size(); ++k) {
            const double a = grid.disagreement[k - 1], b = grid.disagreement[k];
            c.check(fmt::format("frac={} d={}->{} indep={}", f, a, b, in),
                    g(f, b, in) - g(f, a, in), f * in == 0.0);
          }
        }
      }
    }
    c.finish();
  }
  {
    ClaimBuilder c(report, "gamma_increasing_in_indep", "indep", +1);
    if (grid.indep.size() > 1) {
      for (double f : grid.frac) {
        for (double d : grid.disagreement) {
          for (std::size_t k = 1; k < grid.indep.size(); ++k) {
            const double a = grid.indep[k - 1], b = grid.indep[k];
            c.check(fmt::format("frac={} d={} indep={}->{}", f, d, a, b),
                    g(f, d, b) - g(f, d, a), f * (1.0 - d) == 0.0);
          }
        }
      }
    }
    c.finish();
  }

  auto bound_at = [&grid](std::size_t n_unlabeled, double d, double in) {
    BoundInputs b;
    b.empirical_risk = grid.empirical_risk;
    b.n_labeled = grid.n_labeled;
    b.n_unlabeled = n_unlabeled;
    b.d_eff = grid.d_eff;
    b.delta = grid.delta;
    b.c1 = grid.c1;
    b.c2 = grid.c2;
    const double total = static_cast<double>(grid.n_labeled + n_unlabeled);
    b.gamma_inputs = {static_cast<double>(n_unlabeled) / total, d, in};
    return generalization_bound(b);
  };

  {
    ClaimBuilder bound_claim(report, "bound_decreasing_in_n_unlabeled", "n_unlabeled", -1);
    ClaimBuilder gamma_claim(report, "gamma_increasing_in_n_unlabeled", "n_unlabeled", +1);
    const bool gamma_face = (1.0 - grid.nu_disagreement) * grid.nu_indep == 0.0;
    for (std::size_t k = 1; k < grid.n_unlabeled.size(); ++k) {
      const auto a = grid.n_unlabeled[k - 1], b = grid.n_unlabeled[k];
      const auto ra = bound_at(a, grid.nu_disagreement, grid.nu_indep);
      const auto rb = bound_at(b, grid.nu_disagreement, grid.nu_indep);
      const auto point = fmt::format("n_labeled={} n_unlabeled={}->{} d={} indep={}",
                                     grid.n_labeled, a, b, grid.nu_disagreement, grid.nu_indep);
      bound_claim.check(point, rb.bound - ra.bound, false);
      gamma_claim.check(point, rb.gamma_term - ra.gamma_term, gamma_face);
    }
    bound_claim.finish();
    gamma_claim.finish();
  }

  const double fixed_frac = static_cast<double>(grid.n_unlabeled_fixed) /
                            static_cast<double>(grid.n_labeled + grid.n_unlabeled_fixed);
  {
    ClaimBuilder c(report, "bound_increasing_in_disagreement", "disagreement", +1);
    if (grid.disagreement.size() > 1) {
      for (double in : grid.indep) {
        for (std::size_t k = 1; k < grid.disagreement.size(); ++k) {
          const double a = grid.disagreement[k - 1], b = grid.disagreement[k];
          c.check(fmt::format("n_unlabeled={} d={}->{} indep={}", grid.n_unlabeled_fixed, a, b,
                              in),
                  bound_at(grid.n_unlabeled_fixed, b, in).bound -
                      bound_at(grid.n_unlabeled_fixed, a, in).bound,
                  fixed_frac * in == 0.0);
        }
      }
    }
    c.finish();
  }
  {
    ClaimBuilder c(report, "bound_decreasing_in_indep", "indep", -1);
    if (grid.indep.size() > 1) {
      for (double d : grid.disagreement) {
        for (std::size_t k = 1; k < grid.indep.size(); ++k) {
          const double a = grid.indep[k - 1], b = grid.indep[k];
          c.check(fmt::format("n_unlabeled={} d={} indep={}->{}", grid.n_unlabeled_fixed, d, a,
                              b),
                  bound_at(grid.n_unlabeled_fixed, d, b).bound -
                      bound_at(grid.n_unlabeled_fixed, d, a).bound,
                  fixed_frac * (1.0 - d) == 0.0);
        }
      }
    }
    c.finish();
  }
  return report;
}

}  // namespace cotrain
