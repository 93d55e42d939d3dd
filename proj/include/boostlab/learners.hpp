#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "boostlab/errors.hpp"
#include "boostlab/hypothesis.hpp"
#include "boostlab/measure.hpp"
#include "boostlab/numeric.hpp"
#include "boostlab/rng.hpp"

namespace boostlab {

struct LearnContext {
  const TrainingSet& data;
  std::span<const double> distribution;   // dense weights over the training set, normalized
  std::span<const std::size_t> samples;   // indices drawn from that distribution
  Rng& rng;
  std::size_t iteration = 0;
};

class WeakLearner {
 public:
  virtual ~WeakLearner() = default;
  virtual std::string name() const = 0;
  // Declared number of examples per call; the engine draws and charges them.
  virtual std::size_t samples_per_call() const { return 64; }
  virtual bool needs_dense_distribution() const { return false; }
  virtual Hypothesis learn(const LearnContext& ctx) = 0;
};

// Analysis instrument with an exactly controlled edge: agrees with the labels
// on a prefix (in a fixed tie order) of cumulative weight just reaching
// 1/2 + gamma, and disagrees elsewhere. It reads the dense distribution, not
// samples, so the promised advantage holds at every iteration by
// construction; the overshoot is bounded by the largest single weight.
class PlantedWeakLearner final : public WeakLearner {
 public:
  PlantedWeakLearner(double gamma, std::size_t m, std::uint64_t tie_seed,
                     std::size_t declared_samples = 64)
      : gamma_(gamma), declared_samples_(declared_samples), tie_order_(m) {
    if (!(gamma_ > 0.0) || gamma_ >= 0.5) throw ConfigError("gamma must lie in (0, 0.5)");
    std::iota(tie_order_.begin(), tie_order_.end(), std::size_t{0});
    Rng rng(tie_seed);
    shuffle(tie_order_, rng);
  }

  PlantedWeakLearner(double gamma, std::vector<std::size_t> tie_order,
                     std::size_t declared_samples = 64)
      : gamma_(gamma), declared_samples_(declared_samples), tie_order_(std::move(tie_order)) {
    if (!(gamma_ > 0.0) || gamma_ >= 0.5) throw ConfigError("gamma must lie in (0, 0.5)");
  }

  std::string name() const override { return "planted"; }
  std::size_t samples_per_call() const override { return declared_samples_; }
  bool needs_dense_distribution() const override { return true; }

  Hypothesis learn(const LearnContext& ctx) override {
    const auto& dist = ctx.distribution;
    if (dist.size() != tie_order_.size())
      throw ConfigError("planted learner requires the dense distribution");
    const double target = 0.5 + gamma_;
    Hypothesis h;
    h.id = "planted:t=" + std::to_string(ctx.iteration);
    h.train_predictions.assign(dist.size(), 0);
    KahanSum cum;
    bool reached = false;
    for (const std::size_t idx : tie_order_) {
      if (!reached) {
        cum.add(dist[idx]);
        h.train_predictions[idx] = static_cast<std::int8_t>(ctx.data.label(idx));
        if (cum.value() >= target - 1e-12) reached = true;
      } else {
        h.train_predictions[idx] = static_cast<std::int8_t>(-ctx.data.label(idx));
      }
    }
    if (!reached) throw Error("distribution mass below the advantage target");
    return h;
  }

 private:
  double gamma_;
  std::size_t declared_samples_;
  std::vector<std::size_t> tie_order_;
};

// Single-coordinate threshold stump fitted to the drawn sample by maximizing
// empirical agreement. No advantage guarantee; the engine contract-checks it.
class StumpWeakLearner final : public WeakLearner {
 public:
  explicit StumpWeakLearner(std::size_t samples_per_call = 64)
      : declared_samples_(samples_per_call) {
    if (declared_samples_ == 0) throw ConfigError("stump learner needs at least one sample");
  }

  std::string name() const override { return "stump"; }
  std::size_t samples_per_call() const override { return declared_samples_; }

  Hypothesis learn(const LearnContext& ctx) override {
    if (ctx.samples.empty()) throw ConfigError("stump learner received no samples");
    const std::size_t dim = ctx.data.dimension();
    const std::size_t w = ctx.samples.size();

    std::size_t best_coord = 0;
    double best_threshold = 0.0;
    int best_polarity = 1;
    long long best_agreement = -1;

    std::vector<std::pair<double, int>> column(w);
    for (std::size_t j = 0; j < dim; ++j) {
      for (std::size_t s = 0; s < w; ++s) {
        const std::size_t i = ctx.samples[s];
        column[s] = {ctx.data.point(i)[j], ctx.data.label(i)};
      }
      std::sort(column.begin(), column.end());
      // candidate thresholds: below the smallest value and between distinct
      // neighbors; prediction is polarity * sign(x_j >= threshold).
      long long plus_right = 0;  // agreement of (+1 on x_j >= thr) with thr = -inf
      for (const auto& [v, y] : column) plus_right += y == 1 ? 1 : 0;
      long long agree = plus_right;
      consider(j, column.front().first - 1.0, 1, agree, best_coord, best_threshold,
               best_polarity, best_agreement);
      consider(j, column.front().first - 1.0, -1, static_cast<long long>(w) - agree,
               best_coord, best_threshold, best_polarity, best_agreement);
      for (std::size_t s = 0; s < w; ++s) {
        // moving the threshold just above column[s]: that point flips from
        // predicted +1 to predicted -1
        agree += column[s].second == 1 ? -1 : 1;
        if (s + 1 < w && column[s].first == column[s + 1].first) continue;
        const double thr = s + 1 < w ? 0.5 * (column[s].first + column[s + 1].first)
                                     : column[s].first + 1.0;
        consider(j, thr, 1, agree, best_coord, best_threshold, best_polarity,
                 best_agreement);
        consider(j, thr, -1, static_cast<long long>(w) - agree, best_coord,
                 best_threshold, best_polarity, best_agreement);
      }
    }

    Hypothesis h;
    std::ostringstream id;
    id << "stump:coord=" << best_coord << ",thr=" << best_threshold
       << ",pol=" << best_polarity;
    h.id = id.str();
    const std::size_t coord = best_coord;
    const double thr = best_threshold;
    const int pol = best_polarity;
    h.predict = [coord, thr, pol](std::span<const double> x) {
      return x[coord] >= thr ? pol : -pol;
    };
    return h;
  }

 private:
  static void consider(std::size_t coord, double threshold, int polarity, long long agreement,
                       std::size_t& best_coord, double& best_threshold,
                       int& best_polarity, long long& best_agreement) {
    if (agreement > best_agreement) {
      best_agreement = agreement;
      best_coord = coord;
      best_threshold = threshold;
      best_polarity = polarity;
    }
  }

  std::size_t declared_samples_;
};

// Replays a prescribed sequence of loss vectors; drives the update machinery
// directly with no learning. Used for bound checks that hold for every loss
// sequence, adversarial ones included.
class ScriptedLossLearner final : public WeakLearner {
 public:
  explicit ScriptedLossLearner(std::vector<LossVector> script) : script_(std::move(script)) {}

  std::string name() const override { return "scripted"; }
  std::size_t samples_per_call() const override { return 0; }

  Hypothesis learn(const LearnContext& ctx) override {
    if (next_ >= script_.size()) throw ConfigError("scripted loss sequence exhausted");
    const LossVector& loss = script_[next_++];
    if (loss.size() != ctx.data.size())
      throw ConfigError("scripted loss vector does not match the training set");
    Hypothesis h;
    h.id = "scripted:t=" + std::to_string(ctx.iteration);
    h.train_predictions.resize(loss.size());
    for (std::size_t i = 0; i < loss.size(); ++i)
      h.train_predictions[i] =
          static_cast<std::int8_t>(loss[i] ? ctx.data.label(i) : -ctx.data.label(i));
    return h;
  }

 private:
  std::vector<LossVector> script_;
  std::size_t next_ = 0;
};

}  // namespace boostlab
