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

#include "experiment.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <set>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "config.hpp"
#include "csv.hpp"
#include "error.hpp"
#include "log.hpp"

namespace cotrain {

namespace fs = std::filesystem;

double BoundSettings::effective_d_eff(const GeneratorConfig& g) const {
  if (d_eff > 0.0) return d_eff;
  return static_cast<double>(std::max(g.dim_view1, g.dim_view2) + 1);
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Numeric parameters reachable by name, for sweeps.
using Setter = std::function<void(ExperimentConfig&, double)>;

std::size_t to_count(double v, const std::string& name) {
  if (!(v >= 0.0) || v != std::floor(v)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("{} = {} must be a non-negative integer", name, v), name);
  }
  return static_cast<std::size_t>(v);
}

const std::map<std::string, Setter>& parameter_table() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    t["dim_view1"] = [](ExperimentConfig& c, double v) { c.generator.dim_view1 = to_count(v, "dim_view1"); };
    t["dim_view2"] = [](ExperimentConfig& c, double v) { c.generator.dim_view2 = to_count(v, "dim_view2"); };
    t["class_separation"] = [](ExperimentConfig& c, double v) { c.generator.class_separation = v; };
    t["noise_sigma"] = [](ExperimentConfig& c, double v) { c.generator.noise_sigma = v; };
    t["rho"] = [](ExperimentConfig& c, double v) { c.generator.rho = v; };
    t["latent_dim"] = [](ExperimentConfig& c, double v) { c.generator.latent_dim = to_count(v, "latent_dim"); };
    t["n_labeled"] = [](ExperimentConfig& c, double v) { c.generator.n_labeled = to_count(v, "n_labeled"); };
    t["n_unlabeled"] = [](ExperimentConfig& c, double v) { c.generator.n_unlabeled = to_count(v, "n_unlabeled"); };
    t["n_test"] = [](ExperimentConfig& c, double v) { c.generator.n_test = to_count(v, "n_test"); };
    t["class_balance"] = [](ExperimentConfig& c, double v) { c.generator.class_balance = v; };
    t["shift_magnitude"] = [](ExperimentConfig& c, double v) { c.generator.shift_magnitude = v; };
    t["rounds"] = [](ExperimentConfig& c, double v) { c.cotrain.rounds = to_count(v, "rounds"); };
    t["tau_pseudo"] = [](ExperimentConfig& c, double v) { c.cotrain.tau_pseudo = v; };
    t["tau_agree"] = [](ExperimentConfig& c, double v) { c.cotrain.tau_agree = v; };
    t["k_pseudo"] = [](ExperimentConfig& c, double v) { c.cotrain.k_pseudo = to_count(v, "k_pseudo"); };
    t["lambda_agree"] = [](ExperimentConfig& c, double v) { c.cotrain.lambda_agree = v; };
    t["learning_rate"] = [](ExperimentConfig& c, double v) { c.cotrain.train.learning_rate = v; };
    t["epochs"] = [](ExperimentConfig& c, double v) { c.cotrain.train.epochs = to_count(v, "epochs"); };
    t["l2_penalty"] = [](ExperimentConfig& c, double v) { c.cotrain.train.l2_penalty = v; };
    return t;
  }();
  return table;
}

}  // namespace

bool is_sweep_parameter(const std::string& name) { return parameter_table().contains(name); }

void set_parameter(ExperimentConfig& cfg, const std::string& name, double value) {
  const auto it = parameter_table().find(name);
  if (it == parameter_table().end()) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("'{}' is not a recognised sweep parameter", name), "parameter");
  }
  it->second(cfg, value);
}

void ExperimentConfig::validate() const {
  generator.validate();
  cotrain.validate();
  if (seeds.empty()) throw Error(ErrorCode::kInvalidArgument, "seeds must not be empty", "seeds");
  if (sweep) {
    if (!is_sweep_parameter(sweep->parameter)) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("parameter '{}' is not a recognised sweep parameter",
                              sweep->parameter),
                  "parameter");
    }
    if (sweep->values.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "values must not be empty", "values");
    }
  }
  if (!(bound.c1 > 0.0)) throw Error(ErrorCode::kInvalidArgument, "c1 must be positive", "c1");
  if (!(bound.c2 > 0.0)) throw Error(ErrorCode::kInvalidArgument, "c2 must be positive", "c2");
  if (!(bound.delta > 0.0 && bound.delta < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("delta = {} is outside (0, 1)", bound.delta), "delta");
  }
  if (!(bound.d_eff >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "d_eff must be >= 0", "d_eff");
  }
  if (audit.handicap < 1 || audit.handicap > audit.lemma_n_labeled) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("handicap = {} must be in [1, lemma_n_labeled = {}]", audit.handicap,
                            audit.lemma_n_labeled),
                "handicap");
  }
  if (!(audit.contrast_rho >= 0.0 && audit.contrast_rho <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("contrast_rho = {} is outside [0, 1]", audit.contrast_rho),
                "contrast_rho");
  }
}

namespace {

class Binder {
 public:
  explicit Binder(const ConfigDocument& doc) : doc_(doc) {}

  const ConfigValue* get(const std::string& section, const std::string& key) {
    const auto* v = doc_.find(section, key);
    if (v != nullptr) used_.insert({section, key});
    return v;
  }
  static std::string name(const std::string& section, const std::string& key) {
    return section.empty() ? key : section + "." + key;
  }
  void real(const std::string& s, const std::string& k, double& out) {
    if (const auto* v = get(s, k)) out = doc_.as_real(*v, name(s, k));
  }
  void count(const std::string& s, const std::string& k, std::size_t& out) {
    if (const auto* v = get(s, k)) out = static_cast<std::size_t>(doc_.as_uint(*v, name(s, k)));
  }
  void uint(const std::string& s, const std::string& k, std::uint64_t& out) {
    if (const auto* v = get(s, k)) out = doc_.as_uint(*v, name(s, k));
  }
  void flag(const std::string& s, const std::string& k, bool& out) {
    if (const auto* v = get(s, k)) out = doc_.as_bool(*v, name(s, k));
  }
  void text(const std::string& s, const std::string& k, std::string& out) {
    if (const auto* v = get(s, k)) out = doc_.as_string(*v, name(s, k));
  }
  void reals(const std::string& s, const std::string& k, std::vector<double>& out) {
    if (const auto* v = get(s, k)) out = doc_.as_real_list(*v, name(s, k));
  }
  void uints(const std::string& s, const std::string& k, std::vector<std::uint64_t>& out) {
    if (const auto* v = get(s, k)) out = doc_.as_uint_list(*v, name(s, k));
  }
  void counts(const std::string& s, const std::string& k, std::vector<std::size_t>& out) {
    if (const auto* v = get(s, k)) {
      out.clear();
      for (auto u : doc_.as_uint_list(*v, name(s, k))) out.push_back(static_cast<std::size_t>(u));
    }
  }

  void reject_unknown() const {
    static const std::set<std::string> known = {"",      "generator", "cotrain", "train",
                                                "bound", "sweep",     "figures", "audit"};
    for (const auto& [section, keys] : doc_.sections()) {
      if (!known.contains(section)) {
        const int line = keys.empty() ? 0 : keys.begin()->second.line;
        doc_.fail(line, fmt::format("unknown section [{}]", section));
      }
      for (const auto& [key, value] : keys) {
        if (!used_.contains({section, key})) {
          doc_.fail(value.line, fmt::format("unknown key '{}'", name(section, key)));
        }
      }
    }
  }

  // Line of `field` in whichever section defines it, with its qualified name.
  std::pair<int, std::string> locate(const std::string& field) const {
    for (const auto& [section, keys] : doc_.sections()) {
      if (const auto it = keys.find(field); it != keys.end()) {
        return {it->second.line, name(section, field)};
      }
    }
    return {0, field};
  }

 private:
  const ConfigDocument& doc_;
  std::set<std::pair<std::string, std::string>> used_;
};

ExperimentConfig bind(const ConfigDocument& doc) {
  ExperimentConfig cfg;
  Binder b(doc);

  b.uints("", "seeds", cfg.seeds);
  b.text("", "output_dir", cfg.output_dir);

  auto& g = cfg.generator;
  b.count("generator", "dim_view1", g.dim_view1);
  b.count("generator", "dim_view2", g.dim_view2);
  b.real("generator", "class_separation", g.class_separation);
  b.real("generator", "noise_sigma", g.noise_sigma);
  b.real("generator", "rho", g.rho);
  // latent_dim defaults to the larger view dimension unless given.
  g.latent_dim = 0;
  b.count("generator", "latent_dim", g.latent_dim);
  b.count("generator", "n_labeled", g.n_labeled);
  b.count("generator", "n_unlabeled", g.n_unlabeled);
  b.count("generator", "n_test", g.n_test);
  b.real("generator", "class_balance", g.class_balance);
  b.real("generator", "shift_magnitude", g.shift_magnitude);
  b.flag("generator", "shift_unlabeled", cfg.shift_unlabeled);
  b.uint("generator", "seed", g.seed);
  if (doc.find("generator", "latent_dim") == nullptr) {
    g.latent_dim = std::max(g.dim_view1, g.dim_view2);
  }

  auto& c = cfg.cotrain;
  b.count("cotrain", "rounds", c.rounds);
  b.real("cotrain", "tau_pseudo", c.tau_pseudo);
  b.real("cotrain", "tau_agree", c.tau_agree);
  b.count("cotrain", "k_pseudo", c.k_pseudo);
  b.real("cotrain", "lambda_agree", c.lambda_agree);
  b.flag("cotrain", "accumulate_pseudo", c.accumulate_pseudo);
  b.real("cotrain", "delta0", c.delta0);
  b.uint("cotrain", "seed", c.seed);

  auto& t = c.train;
  b.real("train", "learning_rate", t.learning_rate);
  b.count("train", "epochs", t.epochs);
  b.real("train", "l2_penalty", t.l2_penalty);
  b.real("train", "prob_clip", t.prob_clip);

  b.real("bound", "c1", cfg.bound.c1);
  b.real("bound", "c2", cfg.bound.c2);
  b.real("bound", "delta", cfg.bound.delta);
  b.real("bound", "d_eff", cfg.bound.d_eff);

  if (doc.sections().contains("sweep")) {
    SweepSpec sweep;
    b.text("sweep", "parameter", sweep.parameter);
    b.reals("sweep", "values", sweep.values);
    cfg.sweep = sweep;
  }

  auto& f = cfg.figures;
  b.reals("figures", "fig1_lambdas", f.fig1_lambdas);
  b.count("figures", "fig1_rounds", f.fig1_rounds);
  b.real("figures", "fig1_c_min", f.fig1_c_min);
  b.real("figures", "fig1_eps0", f.fig1_eps0);
  b.count("figures", "fig2_n_labeled", f.fig2_n_labeled);
  b.real("figures", "fig2_empirical_risk", f.fig2_empirical_risk);
  b.real("figures", "fig2_disagreement", f.fig2_disagreement);
  b.real("figures", "fig2_indep", f.fig2_indep);
  b.uints("figures", "fig2_n_unlabeled", f.fig2_n_unlabeled);
  b.real("figures", "fig3_frac", f.fig3_frac);
  b.reals("figures", "fig3_disagreement", f.fig3_disagreement);
  b.reals("figures", "fig3_indep", f.fig3_indep);

  auto& a = cfg.audit;
  b.count("audit", "handicap", a.handicap);
  b.count("audit", "lemma_n_labeled", a.lemma_n_labeled);
  b.count("audit", "lemma_n_unlabeled", a.lemma_n_unlabeled);
  b.flag("audit", "independence_contrast", a.independence_contrast);
  b.real("audit", "contrast_rho", a.contrast_rho);
  b.real("audit", "min_improved_fraction", a.min_improved_fraction);
  b.reals("audit", "frac", a.grid.frac);
  b.reals("audit", "disagreement", a.grid.disagreement);
  b.reals("audit", "indep", a.grid.indep);
  b.counts("audit", "n_unlabeled", a.grid.n_unlabeled);
  b.count("audit", "n_labeled", a.grid.n_labeled);
  b.real("audit", "empirical_risk", a.grid.empirical_risk);
  b.real("audit", "nu_disagreement", a.grid.nu_disagreement);
  b.real("audit", "nu_indep", a.grid.nu_indep);
  b.count("audit", "n_unlabeled_fixed", a.grid.n_unlabeled_fixed);
  a.grid.c1 = cfg.bound.c1;
  a.grid.c2 = cfg.bound.c2;
  a.grid.delta = cfg.bound.delta;
  a.grid.d_eff = cfg.bound.effective_d_eff(g);

  b.reject_unknown();
  try {
    cfg.validate();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kInvalidArgument) throw;
    const auto [line, qualified] = b.locate(e.field());
    std::string message = e.what();
    if (!e.field().empty() && message.starts_with(e.field())) {
      message = qualified + message.substr(e.field().size());
    }
    doc.fail(line, message);
  }
  return cfg;
}

}  // namespace

ExperimentConfig parse_experiment_config(std::string_view text, const std::string& source) {
  return bind(ConfigDocument::parse(text, source));
}

ExperimentConfig load_experiment_config(const fs::path& path) {
  return bind(ConfigDocument::load(path));
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw Error(ErrorCode::kInvalidArgument, "quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

namespace {

std::uint64_t run_seed(std::uint64_t seed, std::int64_t offset) {
  return seed + static_cast<std::uint64_t>(offset);
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw Error(ErrorCode::kIo, fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
  }
}

struct SeedRun {
  std::uint64_t seed = 0;
  CoTrainResult result;
  std::vector<BoundReport> bounds;  // one per trajectory row; NaN terms if unavailable
};

double labeled_error(const CoTrainResult& r, const Dataset& ds) {
  return std::max(evaluate_error(r.clf1, ds.labeled, 1), evaluate_error(r.clf2, ds.labeled, 2));
}

SeedRun run_seed_cotrain(const ExperimentConfig& cfg, std::uint64_t seed) {
  const Dataset ds = dataset_for_seed(cfg, seed);
  CoTrainConfig cc = cfg.cotrain;
  cc.seed = seed;

  SeedRun run{seed, run_cotraining(ds, cc), {}};

  double indep = kNaN;
  try {
    indep = conditional_dependence_stat(ds).indep;
  } catch (const Error& e) {
    logger().info("seed {}: no independence proxy ({})", seed, e.what());
  }
  // Empirical risk of the final pair on the labeled set; the bound is
  // evaluated per round with that round's disagreement.
  const double emp = labeled_error(run.result, ds);
  const double d_eff = cfg.bound.effective_d_eff(ds.config);
  const std::size_t nl = ds.labeled.size(), nu = ds.unlabeled.size();
  for (const auto& m : run.result.trajectory) {
    BoundReport rep{kNaN, kNaN, kNaN, kNaN, kNaN, ""};
    if (static_cast<double>(nl) > d_eff && std::isfinite(indep)) {
      BoundInputs in;
      in.empirical_risk = emp;
      in.n_labeled = nl;
      in.n_unlabeled = nu;
      in.d_eff = d_eff;
      in.delta = cfg.bound.delta;
      in.c1 = cfg.bound.c1;
      in.c2 = cfg.bound.c2;
      in.gamma_inputs = {static_cast<double>(nu) / static_cast<double>(nl + nu), m.disagreement,
                         indep};
      rep = generalization_bound(in);
    }
    run.bounds.push_back(rep);
  }
  return run;
}

void write_seed_outputs(const SeedRun& run, const fs::path& dir) {
  ensure_dir(dir);
  csv::Writer out(dir / "trajectory.csv",
                  {"round", "err_view1", "err_view2", "err_max", "disagreement", "pool_size",
                   "added_view1", "added_view2", "pseudo_accuracy", "empirical_risk",
                   "complexity_term", "gamma", "confidence_term", "bound"});
  for (std::size_t i = 0; i < run.result.trajectory.size(); ++i) {
    const auto& m = run.result.trajectory[i];
    const auto& b = run.bounds[i];
    out.field(m.round).field(m.err_view1).field(m.err_view2).field(m.err_max)
        .field(m.disagreement).field(m.pool_size).field(m.added_view1).field(m.added_view2)
        .field(m.pseudo_accuracy).field(b.empirical_risk_term).field(b.complexity_term)
        .field(b.gamma_term).field(b.confidence_term).field(b.bound);
    out.end_row();
  }
  write_records_csv(run.result.records, dir / "records.csv");
  save_checkpoint(run.result.clf1, dir / "clf1.csv");
  save_checkpoint(run.result.clf2, dir / "clf2.csv");
}

// err_max per round 0..rounds; runs that stopped early carry their final
// value forward.
std::vector<double> padded_err_max(const CoTrainResult& r, std::size_t rounds) {
  std::vector<double> out;
  for (std::size_t k = 0; k <= rounds; ++k) {
    out.push_back(r.trajectory[std::min(k, r.trajectory.size() - 1)].err_max);
  }
  return out;
}

struct Aggregate {
  std::vector<double> median, q1, q3;
};

Aggregate write_summary(const std::vector<SeedRun>& runs, std::size_t rounds, const fs::path& dir) {
  Aggregate agg;
  csv::Writer out(dir / "summary.csv", {"round", "n_seeds", "median_err_max", "q1_err_max",
                                         "q3_err_max", "iqr_err_max"});
  std::vector<std::vector<double>> per_seed;
  for (const auto& r : runs) per_seed.push_back(padded_err_max(r.result, rounds));
  for (std::size_t k = 0; k <= rounds; ++k) {
    std::vector<double> col;
    for (const auto& s : per_seed) col.push_back(s[k]);
    agg.median.push_back(quantile(col, 0.5));
    agg.q1.push_back(quantile(col, 0.25));
    agg.q3.push_back(quantile(col, 0.75));
    out.field(k).field(runs.size()).field(agg.median.back()).field(agg.q1.back())
        .field(agg.q3.back()).field(agg.q3.back() - agg.q1.back());
    out.end_row();
  }

  csv::Writer fit_out(dir / "contraction_fit.csv",
                      {"lambda_hat", "c_min_hat", "alpha_hat", "r_squared",
                       "lambda_in_unit_interval"});
  try {
    const auto fit = fit_contraction(agg.median);
    fit_out.field(fit.lambda_hat).field(fit.c_min_hat).field(fit.alpha_hat).field(fit.r_squared)
        .field(fit.lambda_in_unit_interval);
  } catch (const Error& e) {
    logger().info("contraction fit skipped: {}", e.what());
    fit_out.field(kNaN).field(kNaN).field(kNaN).field(kNaN).field(false);
  }
  fit_out.end_row();
  return agg;
}

Aggregate cotrain_into(const ExperimentConfig& cfg, const RunOptions& opts, const fs::path& dir,
                       std::ostream& report) {
  ensure_dir(dir);
  std::vector<SeedRun> runs;
  for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
    const auto seed = run_seed(cfg.seeds[i], opts.seed_offset);
    try {
      runs.push_back(run_seed_cotrain(cfg, seed));
    } catch (const Error& e) {
      throw Error(e.code(), fmt::format("seed index {} (seed {}): {}", i, seed, e.what()),
                  e.field());
    }
    write_seed_outputs(runs.back(), dir / fmt::format("seed_{}", seed));
  }
  auto agg = write_summary(runs, cfg.cotrain.rounds, dir);
  fmt::print(report, "{}: {} seed(s); median err_max round 0 = {:.4f}, round {} = {:.4f}\n",
             dir.string(), runs.size(), agg.median.front(), cfg.cotrain.rounds,
             agg.median.back());
  return agg;
}

}  // namespace

Dataset dataset_for_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
  GeneratorConfig g = cfg.generator;
  g.seed = seed;
  Dataset ds = generate_dataset(g);
  if (g.shift_magnitude > 0.0) {
    ds = apply_shift(ds, g.shift_magnitude, seed, cfg.shift_unlabeled);
  }
  return ds;
}

void cmd_generate(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& report) {
  ensure_dir(opts.out_dir);
  const auto seed = run_seed(cfg.generator.seed, opts.seed_offset);
  const Dataset ds = dataset_for_seed(cfg, seed);
  save_dataset_csv(ds, opts.out_dir / "dataset.csv", opts.out_dir / "oracle.csv");
  fmt::print(report, "labeled {} unlabeled {} test {}\n", ds.labeled.size(), ds.unlabeled.size(),
             ds.test.size());
  try {
    const auto dep = conditional_dependence_stat(ds);
    fmt::print(report, "conditional dependence stat {:.6f} (indep proxy {:.6f})\n", dep.stat,
               dep.indep);
  } catch (const Error& e) {
    fmt::print(report, "conditional dependence stat unavailable: {}\n", e.what());
  }
}

void cmd_cotrain(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& report) {
  cotrain_into(cfg, opts, opts.out_dir, report);
}

void cmd_sweep(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& report) {
  if (!cfg.sweep) {
    throw Error(ErrorCode::kConfig, "sweep needs a [sweep] section with parameter and values");
  }
  ensure_dir(opts.out_dir);
  struct Cell {
    double value;
    Aggregate agg;
  };
  std::vector<Cell> cells;
  for (double value : cfg.sweep->values) {
    ExperimentConfig cell = cfg;
    set_parameter(cell, cfg.sweep->parameter, value);
    if (cfg.sweep->parameter == "dim_view1" || cfg.sweep->parameter == "dim_view2") {
      cell.generator.latent_dim = std::max(cell.generator.latent_dim,
                                           std::max(cell.generator.dim_view1,
                                                    cell.generator.dim_view2));
    }
    cell.validate();
    const auto dir = opts.out_dir / fmt::format("{}={}", cfg.sweep->parameter, value);
    cells.push_back({value, cotrain_into(cell, opts, dir, report)});
  }
  csv::Writer out(opts.out_dir / "sweep_summary.csv",
                  {"parameter", "value", "round", "median_err_max", "q1_err_max", "q3_err_max"});
  for (const auto& c : cells) {
    for (std::size_t k = 0; k < c.agg.median.size(); ++k) {
      out.field(cfg.sweep->parameter).field(c.value).field(k).field(c.agg.median[k])
          .field(c.agg.q1[k]).field(c.agg.q3[k]);
      out.end_row();
    }
  }
}

void cmd_figures(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& report) {
  ensure_dir(opts.out_dir);
  const auto& f = cfg.figures;

  {
    csv::Writer out(opts.out_dir / "fig1.csv", {"lambda", "round", "eps_max"});
    for (double lambda : f.fig1_lambdas) {
      const auto eps = simulate_recursion(lambda, f.fig1_c_min, f.fig1_eps0, f.fig1_rounds);
      for (std::size_t k = 0; k < eps.size(); ++k) {
        out.field(lambda).field(k).field(eps[k]);
        out.end_row();
      }
    }
  }
  {
    auto n_unlabeled = f.fig2_n_unlabeled;
    if (n_unlabeled.empty()) {
      for (std::uint64_t nu = 0; nu <= 10000; nu += 100) n_unlabeled.push_back(nu);
    }
    csv::Writer out(opts.out_dir / "fig2.csv",
                    {"n_unlabeled", "gamma", "bound", "complexity_term", "confidence_term"});
    for (auto nu : n_unlabeled) {
      BoundInputs in;
      in.empirical_risk = f.fig2_empirical_risk;
      in.n_labeled = f.fig2_n_labeled;
      in.n_unlabeled = nu;
      in.d_eff = cfg.bound.effective_d_eff(cfg.generator);
      in.delta = cfg.bound.delta;
      in.c1 = cfg.bound.c1;
      in.c2 = cfg.bound.c2;
      const double total = static_cast<double>(f.fig2_n_labeled + nu);
      in.gamma_inputs = {static_cast<double>(nu) / total, f.fig2_disagreement, f.fig2_indep};
      const auto r = generalization_bound(in);
      out.field(static_cast<std::size_t>(nu)).field(r.gamma_term).field(r.bound)
          .field(r.complexity_term).field(r.confidence_term);
      out.end_row();
    }
  }
  {
    auto grid = [](std::vector<double> v) {
      if (v.empty()) {
        for (int i = 0; i <= 20; ++i) v.push_back(i / 20.0);
      }
      return v;
    };
    const auto ds = grid(f.fig3_disagreement);
    const auto is = grid(f.fig3_indep);
    csv::Writer out(opts.out_dir / "fig3.csv", {"disagreement", "indep", "gamma"});
    for (double d : ds) {
      for (double in : is) {
        out.field(d).field(in).field(gamma({f.fig3_frac, d, in}));
        out.end_row();
      }
    }
  }
  fmt::print(report, "wrote fig1.csv fig2.csv fig3.csv to {}\n", opts.out_dir.string());
}

bool cmd_audit(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& report) {
  ensure_dir(opts.out_dir);
  const auto audit = monotonicity_audit(cfg.audit.grid);
  {
    csv::Writer out(opts.out_dir / "audit.csv",
                    {"claim", "axis", "grid_point", "difference", "sign_ok"});
    for (const auto& row : audit.rows) {
      out.field(row.claim).field(row.axis).field(row.grid_point).field(row.difference);
      out.field(row.vacuous ? std::string_view("vacuous") : std::string_view(row.sign_ok ? "1" : "0"));
      out.end_row();
    }
  }

  csv::Writer summary(opts.out_dir / "report.csv", {"check", "value", "threshold", "pass"});
  for (const auto& c : audit.claims) {
    summary.field(c.claim).field(c.violations).field(std::size_t{0})
        .field(std::string_view(to_string(c.status)));
    summary.end_row();
    fmt::print(report, "{:<36} {} ({} checked, {} violations){}\n", c.claim, to_string(c.status),
               c.checked, c.violations,
               c.first_counterexample ? " first: " + *c.first_counterexample : "");
  }

  // One-step pseudo-label improvement, at the configured rho and optionally
  // at the contrast rho with the same seeds.
  std::vector<double> rhos = {cfg.generator.rho};
  if (cfg.audit.independence_contrast && cfg.audit.contrast_rho != cfg.generator.rho) {
    rhos.push_back(cfg.audit.contrast_rho);
  }
  std::vector<double> improved_fraction;
  {
    csv::Writer out(opts.out_dir / "lemma.csv",
                    {"rho", "seed", "eps1_before", "eps2", "eps1_after", "improved",
                     "precondition_violated", "pseudo_labels", "pseudo_accuracy"});
    for (double rho : rhos) {
      std::size_t improved = 0;
      double before = 0.0, after = 0.0, teacher = 0.0;
      for (auto s : cfg.seeds) {
        const auto seed = run_seed(s, opts.seed_offset);
        ExperimentConfig lemma_cfg = cfg;
        lemma_cfg.generator.rho = rho;
        lemma_cfg.generator.n_labeled = cfg.audit.lemma_n_labeled;
        lemma_cfg.generator.n_unlabeled = cfg.audit.lemma_n_unlabeled;
        const Dataset ds = dataset_for_seed(lemma_cfg, seed);
        CoTrainConfig cc = cfg.cotrain;
        cc.seed = seed;
        const auto rep = one_step_lemma_experiment(ds, cc, cfg.audit.handicap);
        out.field(rho).field(static_cast<std::size_t>(seed)).field(rep.eps1_before)
            .field(rep.eps2).field(rep.eps1_after).field(rep.improved)
            .field(rep.precondition_violated).field(rep.pseudo_labels)
            .field(rep.pseudo_accuracy);
        out.end_row();
        improved += rep.improved ? 1 : 0;
        before += rep.eps1_before;
        after += rep.eps1_after;
        teacher += rep.eps2;
      }
      const double n = static_cast<double>(cfg.seeds.size());
      improved_fraction.push_back(static_cast<double>(improved) / n);
      const bool frac_ok = improved_fraction.back() >= cfg.audit.min_improved_fraction;
      summary.field(fmt::format("lemma_improved_fraction_rho={}", rho))
          .field(improved_fraction.back()).field(cfg.audit.min_improved_fraction)
          .field(std::string_view(frac_ok ? "pass" : "fail"));
      summary.end_row();
      summary.field(fmt::format("lemma_mean_eps1_after_minus_before_rho={}", rho))
          .field((after - before) / n).field(0.0)
          .field(std::string_view(after < before ? "pass" : "fail"));
      summary.end_row();
      // Whether the student ends below its teacher; informational only.
      summary.field(fmt::format("lemma_mean_eps1_after_minus_eps2_rho={}", rho))
          .field((after - teacher) / n).field(0.0).field("info");
      summary.end_row();
      fmt::print(report, "lemma rho={}: improved in {}/{} seeds, mean eps1 {:.4f} -> {:.4f}\n",
                 rho, improved, cfg.seeds.size(), before / n, after / n);
    }
  }
  if (improved_fraction.size() == 2) {
    const bool lower = improved_fraction[1] < improved_fraction[0];
    summary.field(fmt::format("independence_contrast_rho={}_vs_{}", cfg.audit.contrast_rho,
                              cfg.generator.rho))
        .field(improved_fraction[1] - improved_fraction[0]).field(0.0)
        .field(std::string_view(lower ? "pass" : "fail"));
    summary.end_row();
  }

  {
    csv::Writer out(opts.out_dir / "initial_quality.csv",
                    {"seed", "err_view1", "err_view2", "threshold", "ok"});
    std::size_t ok_count = 0;
    const double threshold = 0.5 - cfg.cotrain.delta0;
    for (auto s : cfg.seeds) {
      const auto seed = run_seed(s, opts.seed_offset);
      const Dataset ds = dataset_for_seed(cfg, seed);
      TrainConfig tc = cfg.cotrain.train;
      tc.seed = seed;
      const double e1 = evaluate_error(supervised_baseline(ds, 1, tc), ds.test, 1);
      const double e2 = evaluate_error(supervised_baseline(ds, 2, tc), ds.test, 2);
      const bool ok = e1 < threshold && e2 < threshold;
      ok_count += ok ? 1 : 0;
      out.field(static_cast<std::size_t>(seed)).field(e1).field(e2).field(threshold).field(ok);
      out.end_row();
    }
    const double fraction = static_cast<double>(ok_count) / static_cast<double>(cfg.seeds.size());
    summary.field("initial_quality_fraction").field(fraction).field(1.0)
        .field(std::string_view(ok_count == cfg.seeds.size() ? "pass" : "fail"));
    summary.end_row();
  }

  // Best single-view test error after supervised training on a large
  // labeled set: the measured counterpart of per-view sufficiency.
  {
    ExperimentConfig big = cfg;
    big.generator.n_labeled = 2000;
    big.generator.n_unlabeled = 0;
    const auto seed = run_seed(cfg.seeds.front(), opts.seed_offset);
    const Dataset ds = dataset_for_seed(big, seed);
    TrainConfig tc = cfg.cotrain.train;
    tc.seed = seed;
    const double e1 = evaluate_error(supervised_baseline(ds, 1, tc), ds.test, 1);
    const double e2 = evaluate_error(supervised_baseline(ds, 2, tc), ds.test, 2);
    summary.field("eps_suff_measured").field(std::min(e1, e2)).field(kNaN).field("info");
    summary.end_row();
    fmt::print(report, "single-view error with 2000 labels: view1 {:.4f}, view2 {:.4f}\n", e1,
               e2);
  }
  return audit.passed();
}

}  // namespace cotrain
