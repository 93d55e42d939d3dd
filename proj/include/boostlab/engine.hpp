#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "boostlab/bregman.hpp"
#include "boostlab/errors.hpp"
#include "boostlab/hypothesis.hpp"
#include "boostlab/implicit_measure.hpp"
#include "boostlab/learners.hpp"
#include "boostlab/ledger.hpp"
#include "boostlab/measure.hpp"
#include "boostlab/numeric.hpp"
#include "boostlab/quantum.hpp"
#include "boostlab/rng.hpp"

namespace boostlab {

enum class Algorithm { Kale, QuantumBoost };

inline const char* to_string(Algorithm a) {
  return a == Algorithm::Kale ? "kale" : "quantumboost";
}

enum class ContractPolicy { Abort, Warn };

enum class RunStatus { Ok, ContractViolation, EstimatorFailure, FloorViolation };

inline const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Ok: return "ok";
    case RunStatus::ContractViolation: return "contract-violation";
    case RunStatus::EstimatorFailure: return "estimator-failure";
    case RunStatus::FloorViolation: return "floor-violation";
  }
  return "?";
}

// Dense materialization is kept for diagnostics and learners that read the
// full distribution; production-sized runs should stay implicit.
inline constexpr std::size_t kDenseTraceGuard = 100000;

struct BoostConfig {
  double gamma = 0.1;
  double epsilon = 0.1;
  double delta = 0.05;  // total failure budget across all projections
  EstimatorMode estimator_mode = EstimatorMode::ExactPass;
  std::optional<std::size_t> iterations_override;
  std::optional<std::size_t> samples_override;  // per-iteration example draws
  bool dense_trace = false;
  ContractPolicy contract = ContractPolicy::Abort;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(gamma > 0.0) || gamma >= 0.5) throw ConfigError("gamma must lie in (0, 0.5)");
    if (!(epsilon > 0.0) || epsilon >= 1.0) throw ConfigError("epsilon must lie in (0,1)");
    if (!(delta > 0.0) || delta >= 1.0) throw ConfigError("delta must lie in (0,1)");
    if (iterations_override && *iterations_override == 0)
      throw ConfigError("iteration override must be positive");
  }

  // T = floor(4 ln(1/epsilon) / gamma^2) + 1 unless overridden.
  std::size_t iterations() const {
    if (iterations_override) return *iterations_override;
    const double t = 4.0 * std::log(1.0 / epsilon) / (gamma * gamma);
    return static_cast<std::size_t>(std::floor(t)) + 1;
  }

  // Projection interval K = ceil(1/gamma).
  std::size_t interval() const { return nudged_ceil(1.0 / gamma); }

  // Approximate-projection precision.
  double zeta() const { return gamma / 4.0; }
};

struct IterationRow {
  std::size_t t = 0;
  double weight = 0.0;           // |M^t| at iteration start
  double empirical_error = 0.0;  // of the majority vote over h_1..h_t
  double advantage = 0.0;        // <D^t, loss^t>
  double max_smoothness = 0.0;   // max_i D^t(x_i) * m
  bool projected = false;
  double c_tilde = std::numeric_limits<double>::quiet_NaN();
  double delta_psi_update = std::numeric_limits<double>::quiet_NaN();
  double delta_psi_proj = std::numeric_limits<double>::quiet_NaN();
  QueryLedger ledger;  // cumulative snapshot

  nlohmann::json to_json() const {
    nlohmann::json j{{"t", t},
                     {"weight", weight},
                     {"empirical_error", empirical_error},
                     {"advantage", advantage},
                     {"max_smoothness", max_smoothness},
                     {"projected", projected},
                     {"ledger", ledger.to_json()}};
    j["c_tilde"] = projected ? nlohmann::json(c_tilde) : nlohmann::json();
    j["delta_psi_update"] = std::isnan(delta_psi_update) ? nlohmann::json()
                                                         : nlohmann::json(delta_psi_update);
    j["delta_psi_proj"] =
        std::isnan(delta_psi_proj) ? nlohmann::json() : nlohmann::json(delta_psi_proj);
    return j;
  }
};

// Dense snapshots around one projection event (dense-trace mode only).
struct ProjectionTrace {
  std::size_t t = 0;
  std::vector<double> pre;    // measure after the update, before projecting
  std::vector<double> post;   // min(1, c~ * pre)
  std::vector<double> exact;  // min(1, c* * pre) with the exact constant
  double c_tilde = 1.0;
  double c_exact = 1.0;
};

struct RunRecord {
  Algorithm algorithm = Algorithm::QuantumBoost;
  double gamma = 0.0;
  double epsilon = 0.0;
  double zeta = 0.0;
  double delta = 0.0;
  std::size_t m = 0;
  std::size_t planned_iterations = 0;
  std::size_t interval = 1;
  std::size_t projections = 0;

  std::vector<IterationRow> rows;
  std::vector<LossVector> losses;
  std::vector<ProjectionTrace> projection_traces;  // dense-trace mode only

  QueryLedger sampler_ledger;
  QueryLedger estimator_ledger;

  double final_error = std::numeric_limits<double>::quiet_NaN();
  double min_weight = std::numeric_limits<double>::infinity();
  double max_smoothness = 0.0;
  std::size_t contract_warnings = 0;

  RunStatus status = RunStatus::Ok;
  std::string message;

  std::size_t executed_iterations() const { return rows.size(); }

  nlohmann::json summary() const {
    QueryLedger total = sampler_ledger;
    total.merge(estimator_ledger);
    return nlohmann::json{
        {"algo", to_string(algorithm)},
        {"gamma", gamma},
        {"epsilon", epsilon},
        {"zeta", zeta},
        {"m", m},
        {"T", executed_iterations()},
        {"planned_T", planned_iterations},
        {"K", interval},
        {"R", projections},
        {"final_error", final_error},
        {"min_weight", min_weight},
        {"max_smoothness", max_smoothness},
        {"contract_warnings", contract_warnings},
        {"status", to_string(status)},
        {"message", message},
        {"ledgers", nlohmann::json{{"sampler", sampler_ledger.to_json()},
                                   {"estimator", estimator_ledger.to_json()},
                                   {"total", total.to_json()}}}};
  }

  // One JSON object per line; each line parses independently.
  void write_jsonl(std::ostream& out) const {
    for (const auto& row : rows) out << row.to_json().dump() << '\n';
  }
};

struct RunResult {
  RunRecord record;
  std::vector<Hypothesis> hypotheses;
  std::vector<double> final_measure;
  std::optional<ImplicitMeasure> implicit;  // lazy algorithm only

  int final_prediction(std::size_t index) const {
    long long votes = 0;
    for (const auto& h : hypotheses) votes += h.train_predictions[index];
    return majority_sign(votes);
  }
};

namespace detail {

struct VoteTally {
  explicit VoteTally(const TrainingSet& data)
      : data_(data), votes_(data.size(), 0) {}

  // Returns the empirical error of the majority vote after adding h.
  double add(const Hypothesis& h) {
    std::size_t errors = 0;
    for (std::size_t i = 0; i < votes_.size(); ++i) {
      votes_[i] += h.train_predictions[i];
      if (majority_sign(votes_[i]) != data_.label(i)) ++errors;
    }
    return static_cast<double>(errors) / static_cast<double>(votes_.size());
  }

 private:
  const TrainingSet& data_;
  std::vector<long long> votes_;
};

inline double weighted_loss_fraction(std::span<const double> weights, const LossVector& loss,
                                     double total) {
  KahanSum acc;
  for (std::size_t i = 0; i < weights.size(); ++i)
    if (loss[i]) acc.add(weights[i]);
  return acc.value() / total;
}

}  // namespace detail

// Lazy-projection boosting: multiplicative updates every iteration, an
// approximate projection back onto the density polytope every K-th iteration
// (and a trailing one at t = T when T is not a multiple of K), majority vote
// at the end. The dense mirror kept here applies exactly the same operation
// sequence as ImplicitMeasure::materialize, so the two trajectories agree
// bit for bit; the implicit representation is returned for inspection.
inline RunResult run_quantumboost(const TrainingSet& data, WeakLearner& learner,
                                  const BoostConfig& cfg) {
  cfg.validate();
  const std::size_t m = data.size();
  if (cfg.dense_trace && m > kDenseTraceGuard)
    throw ConfigError("dense-trace mode is limited to m <= 100000");

  const std::size_t T = cfg.iterations();
  const std::size_t K = cfg.interval();
  const std::size_t planned_projections = ceil_div(T, K);
  const double gamma = cfg.gamma;
  const double eps = cfg.epsilon;
  const double zeta = cfg.zeta();
  const double decay = 1.0 - gamma;
  const double weight_floor =
      eps * static_cast<double>(m) * std::pow(decay, static_cast<double>(K));

  SeedStream seeds(cfg.seed);
  Rng sampler_rng = seeds.stream("sampler");
  Rng learner_rng = seeds.stream("learner");
  MeanEstimator estimator(cfg.estimator_mode, zeta / 8.0, cfg.delta, eps / 2.0,
                          seeds.derive("estimator"));
  const double delta_per_projection = cfg.delta / static_cast<double>(planned_projections);

  RunResult result;
  RunRecord& rec = result.record;
  rec.algorithm = Algorithm::QuantumBoost;
  rec.gamma = gamma;
  rec.epsilon = eps;
  rec.zeta = zeta;
  rec.delta = cfg.delta;
  rec.m = m;
  rec.planned_iterations = T;
  rec.interval = K;

  std::vector<double> mirror(m, eps);
  ImplicitMeasure implicit(m, eps, gamma);
  detail::VoteTally tally(data);
  std::vector<double> dist(learner.needs_dense_distribution() ? m : 0);
  const std::size_t draws = cfg.samples_override.value_or(learner.samples_per_call());
  std::vector<std::size_t> samples;

  for (std::size_t t = 1; t <= T; ++t) {
    IterationRow row;
    row.t = t;
    row.weight = kahan_total(mirror);
    const double max_entry = *std::max_element(mirror.begin(), mirror.end());
    row.max_smoothness = max_entry / row.weight * static_cast<double>(m);

    samples.clear();
    try {
      for (std::size_t s = 0; s < draws; ++s)
        samples.push_back(prepare_smooth_sample([&](std::size_t i) { return mirror[i]; }, m,
                                                weight_floor, sampler_rng,
                                                rec.sampler_ledger));
    } catch (const FloorViolation& e) {
      rec.status = RunStatus::FloorViolation;
      rec.message = e.what();
      rec.rows.push_back(row);
      break;
    }

    if (learner.needs_dense_distribution())
      for (std::size_t i = 0; i < m; ++i) dist[i] = mirror[i] / row.weight;

    Hypothesis h = learner.learn(
        LearnContext{data, dist, samples, learner_rng, t});
    memoize_train_predictions(h, data);
    auto loss = std::make_shared<LossVector>(loss_vector(h, data));

    row.advantage = detail::weighted_loss_fraction(mirror, *loss, row.weight);
    if (row.advantage < 0.5 + gamma - 1e-9) {
      if (cfg.contract == ContractPolicy::Abort) {
        rec.status = RunStatus::ContractViolation;
        rec.message = "weak-learner advantage " + std::to_string(row.advantage) +
                      " below 1/2 + gamma";
        row.empirical_error = tally.add(h);
        rec.rows.push_back(row);
        rec.losses.push_back(*loss);
        result.hypotheses.push_back(std::move(h));
        break;
      }
      ++rec.contract_warnings;
    }

    row.empirical_error = tally.add(h);

    multiplicative_update(mirror, *loss, gamma);  // mirror now holds N^{t+1}

    const bool project = (t % K == 0) || (t == T && T % K != 0);
    if (project) {
      ProjectionTrace trace;
      if (cfg.dense_trace) {
        trace.t = t;
        trace.pre = mirror;
      }
      ApproxProjection proj;
      try {
        proj = project_approx([&](std::size_t i) { return mirror[i]; }, m,
                              DensityTarget(eps, zeta), estimator, delta_per_projection);
      } catch (const EstimatorFailure& e) {
        rec.status = RunStatus::EstimatorFailure;
        rec.message = e.what();
        rec.rows.push_back(row);
        rec.losses.push_back(*loss);
        result.hypotheses.push_back(std::move(h));
        break;
      }
      for (std::size_t i = 0; i < m; ++i)
        mirror[i] = std::min(1.0, proj.c_tilde * mirror[i]);
      implicit.append_update_and_project(loss, proj.c_tilde);
      ++rec.projections;
      row.projected = true;
      row.c_tilde = proj.c_tilde;
      if (cfg.dense_trace) {
        trace.post = mirror;
        trace.c_tilde = proj.c_tilde;
        trace.c_exact = exact_projection_constant(Measure(trace.pre), eps);
        trace.exact.resize(m);
        for (std::size_t i = 0; i < m; ++i)
          trace.exact[i] = std::min(1.0, trace.c_exact * trace.pre[i]);
        rec.projection_traces.push_back(std::move(trace));
      }
    } else {
      implicit.append_update(loss);
    }

    row.ledger = rec.sampler_ledger;
    row.ledger.merge(estimator.ledger());
    rec.min_weight = std::min(rec.min_weight, row.weight);
    rec.max_smoothness = std::max(rec.max_smoothness, row.max_smoothness);
    rec.rows.push_back(row);
    rec.losses.push_back(*loss);
    result.hypotheses.push_back(std::move(h));
  }

  rec.estimator_ledger = estimator.ledger();
  if (!rec.rows.empty()) rec.final_error = rec.rows.back().empirical_error;
  result.final_measure = std::move(mirror);
  result.implicit = std::move(implicit);
  return result;
}

// Eager baseline: dense measures and an exact projection at every iteration.
inline RunResult run_kale_smoothboost(const TrainingSet& data, WeakLearner& learner,
                                      const BoostConfig& cfg) {
  cfg.validate();
  const std::size_t m = data.size();
  if (cfg.dense_trace && m > kDenseTraceGuard)
    throw ConfigError("dense-trace mode is limited to m <= 100000");

  const std::size_t T = cfg.iterations();
  const double gamma = cfg.gamma;
  const double eps = cfg.epsilon;
  const double decay = 1.0 - gamma;
  const double weight_floor = eps * static_cast<double>(m) * decay;

  SeedStream seeds(cfg.seed);
  Rng sampler_rng = seeds.stream("sampler");
  Rng learner_rng = seeds.stream("learner");

  RunResult result;
  RunRecord& rec = result.record;
  rec.algorithm = Algorithm::Kale;
  rec.gamma = gamma;
  rec.epsilon = eps;
  rec.zeta = 0.0;
  rec.delta = cfg.delta;
  rec.m = m;
  rec.planned_iterations = T;
  rec.interval = 1;

  std::vector<double> measure(m, eps);
  detail::VoteTally tally(data);
  std::vector<double> dist(learner.needs_dense_distribution() ? m : 0);
  const std::size_t draws = cfg.samples_override.value_or(learner.samples_per_call());
  std::vector<std::size_t> samples;

  for (std::size_t t = 1; t <= T; ++t) {
    IterationRow row;
    row.t = t;
    row.weight = kahan_total(measure);
    const double max_entry = *std::max_element(measure.begin(), measure.end());
    row.max_smoothness = max_entry / row.weight * static_cast<double>(m);

    samples.clear();
    for (std::size_t s = 0; s < draws; ++s)
      samples.push_back(rejection_sample_classical([&](std::size_t i) { return measure[i]; },
                                                    m, weight_floor, sampler_rng,
                                                    rec.sampler_ledger));

    if (learner.needs_dense_distribution())
      for (std::size_t i = 0; i < m; ++i) dist[i] = measure[i] / row.weight;

    Hypothesis h = learner.learn(
        LearnContext{data, dist, samples, learner_rng, t});
    memoize_train_predictions(h, data);
    auto loss = loss_vector(h, data);

    row.advantage = detail::weighted_loss_fraction(measure, loss, row.weight);
    if (row.advantage < 0.5 + gamma - 1e-9) {
      if (cfg.contract == ContractPolicy::Abort) {
        rec.status = RunStatus::ContractViolation;
        rec.message = "weak-learner advantage " + std::to_string(row.advantage) +
                      " below 1/2 + gamma";
        row.empirical_error = tally.add(h);
        rec.rows.push_back(row);
        rec.losses.push_back(std::move(loss));
        result.hypotheses.push_back(std::move(h));
        break;
      }
      ++rec.contract_warnings;
    }

    row.empirical_error = tally.add(h);

    ProjectionTrace trace;
    multiplicative_update(measure, loss, gamma);
    if (cfg.dense_trace) {
      trace.t = t;
      trace.pre = measure;
    }
    const double c = exact_projection_constant(Measure(measure), eps);
    for (std::size_t i = 0; i < m; ++i) measure[i] = std::min(1.0, c * measure[i]);
    rec.estimator_ledger.oracle_queries += m;  // one dense pass per projection
    ++rec.projections;
    row.projected = true;
    row.c_tilde = c;
    if (cfg.dense_trace) {
      trace.post = measure;
      trace.exact = measure;
      trace.c_tilde = c;
      trace.c_exact = c;
      rec.projection_traces.push_back(std::move(trace));
    }

    row.ledger = rec.sampler_ledger;
    row.ledger.merge(rec.estimator_ledger);
    rec.min_weight = std::min(rec.min_weight, row.weight);
    rec.max_smoothness = std::max(rec.max_smoothness, row.max_smoothness);
    rec.rows.push_back(row);
    rec.losses.push_back(std::move(loss));
    result.hypotheses.push_back(std::move(h));
  }

  if (!rec.rows.empty()) rec.final_error = rec.rows.back().empirical_error;
  result.final_measure = std::move(measure);
  return result;
}

inline RunResult run_algorithm(Algorithm algo, const TrainingSet& data, WeakLearner& learner,
                               const BoostConfig& cfg) {
  return algo == Algorithm::Kale ? run_kale_smoothboost(data, learner, cfg)
                                 : run_quantumboost(data, learner, cfg);
}

}  // namespace boostlab
