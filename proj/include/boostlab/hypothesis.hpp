#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "boostlab/errors.hpp"
#include "boostlab/measure.hpp"

namespace boostlab {

// A +/-1 classifier. `predict` evaluates arbitrary points; hypotheses that
// are defined only on the training indices (analysis instruments such as the
// planted learner's output) ship memoized train_predictions instead and leave
// `predict` empty.
struct Hypothesis {
  std::string id;
  std::function<int(std::span<const double>)> predict;
  std::vector<std::int8_t> train_predictions;

  bool point_evaluable() const { return static_cast<bool>(predict); }
};

// Boolean loss bits over the training set: 1 exactly when the hypothesis
// agrees with the label. Correctly classified points carry high loss because
// the update rule down-weights them.
using LossVector = std::vector<std::uint8_t>;

inline void memoize_train_predictions(Hypothesis& h, const TrainingSet& data) {
  if (!h.train_predictions.empty()) {
    if (h.train_predictions.size() != data.size())
      throw ConfigError("memoized predictions do not match the training set size");
    return;
  }
  if (!h.predict) throw ConfigError("hypothesis lacks both a predictor and memoized predictions");
  h.train_predictions.resize(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const int p = h.predict(data.point(i));
    if (p != 1 && p != -1) throw ConfigError("hypothesis predictions must be -1 or +1");
    h.train_predictions[i] = static_cast<std::int8_t>(p);
  }
}

inline LossVector loss_vector(const Hypothesis& h, const TrainingSet& data) {
  if (h.train_predictions.size() != data.size())
    throw ConfigError("hypothesis predictions not memoized for this training set");
  LossVector loss(data.size());
  for (std::size_t i = 0; i < data.size(); ++i)
    loss[i] = h.train_predictions[i] == data.label(i) ? 1 : 0;
  return loss;
}

// +1 iff strictly more than half the votes are +1; ties resolve to -1.
inline int majority_sign(long long vote_sum) { return vote_sum > 0 ? 1 : -1; }

inline int evaluate_majority(std::span<const Hypothesis> hypotheses,
                             std::span<const double> x) {
  if (hypotheses.empty()) throw ConfigError("majority vote over an empty hypothesis list");
  long long votes = 0;
  for (const auto& h : hypotheses) {
    if (!h.point_evaluable())
      throw ConfigError("hypothesis '" + h.id + "' is not evaluable on arbitrary points");
    votes += h.predict(x);
  }
  return majority_sign(votes);
}

inline int evaluate_majority_at(std::span<const Hypothesis> hypotheses, std::size_t index) {
  if (hypotheses.empty()) throw ConfigError("majority vote over an empty hypothesis list");
  long long votes = 0;
  for (const auto& h : hypotheses) votes += h.train_predictions[index];
  return majority_sign(votes);
}

}  // namespace boostlab
