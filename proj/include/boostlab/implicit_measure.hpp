#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "boostlab/errors.hpp"
#include "boostlab/hypothesis.hpp"
#include "boostlab/measure.hpp"

namespace boostlab {

// N(x) = M(x) * (1-gamma)^loss(x) in place: correctly classified points are
// down-weighted, entries only decrease.
inline void multiplicative_update(std::vector<double>& weights, const LossVector& loss,
                                  double gamma) {
  if (weights.size() != loss.size())
    throw ConfigError("loss vector does not match the measure size");
  if (!(gamma > 0.0) || gamma >= 1.0) throw ConfigError("gamma must lie in (0,1)");
  const double decay = 1.0 - gamma;
  for (std::size_t i = 0; i < weights.size(); ++i)
    if (loss[i]) weights[i] *= decay;
}

// O(t)-evaluable representation of the boosted measure: a uniform base value
// followed by a schedule of multiplicative-decay events, some of which also
// cap the entry at min(1, c~ * value). Entries never leave [0,1]: decays only
// shrink them and caps top out at 1.
class ImplicitMeasure {
 public:
  struct Event {
    std::shared_ptr<const LossVector> loss;
    double c_tilde = 1.0;
    bool projected = false;
  };

  ImplicitMeasure(std::size_t m, double base_value, double gamma)
      : m_(m), base_(base_value), decay_(1.0 - gamma) {
    if (m_ == 0) throw ConfigError("implicit measure needs a positive index count");
    if (!(base_ > 0.0) || base_ > 1.0) throw ConfigError("base value must lie in (0,1]");
    if (!(gamma > 0.0) || gamma >= 0.5) throw ConfigError("gamma must lie in (0, 0.5)");
  }

  void append_update(std::shared_ptr<const LossVector> loss) {
    check_loss(*loss);
    events_.push_back(Event{std::move(loss), 1.0, false});
  }

  void append_update_and_project(std::shared_ptr<const LossVector> loss, double c_tilde) {
    check_loss(*loss);
    if (!(c_tilde >= 1.0)) throw ConfigError("projection constant must be >= 1");
    events_.push_back(Event{std::move(loss), c_tilde, true});
  }

  // v = base; per event: v *= (1-gamma)^loss, then v = min(1, c~ * v) at
  // projection events. Cost is one lookup per stored event.
  double entry(std::size_t i) const {
    double v = base_;
    for (const auto& e : events_) {
      if ((*e.loss)[i]) v *= decay_;
      if (e.projected) v = std::min(1.0, e.c_tilde * v);
    }
    return v;
  }

  // Entrywise materialization; applies the exact same operation sequence as
  // entry(), so the two agree bit for bit.
  Measure materialize() const {
    std::vector<double> w(m_, base_);
    for (const auto& e : events_) {
      const LossVector& loss = *e.loss;
      for (std::size_t i = 0; i < m_; ++i) {
        if (loss[i]) w[i] *= decay_;
        if (e.projected) w[i] = std::min(1.0, e.c_tilde * w[i]);
      }
    }
    return Measure(std::move(w));
  }

  std::size_t size() const { return m_; }
  double base_value() const { return base_; }
  double decay() const { return decay_; }
  std::span<const Event> events() const { return events_; }
  std::size_t event_count() const { return events_.size(); }

 private:
  void check_loss(const LossVector& loss) const {
    if (loss.size() != m_) throw ConfigError("loss vector does not match the index count");
  }

  std::size_t m_;
  double base_;
  double decay_;
  std::vector<Event> events_;
};

}  // namespace boostlab
