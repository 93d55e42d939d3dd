#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "boostlab/engine.hpp"
#include "boostlab/errors.hpp"
#include "boostlab/measure.hpp"
#include "boostlab/numeric.hpp"

namespace boostlab {

namespace detail {

inline std::vector<double> normalize_dense(std::span<const double> w) {
  const double total = kahan_total(w);
  if (total <= 0.0) throw ZeroWeight("cannot normalize a zero trace measure");
  std::vector<double> p(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) p[i] = w[i] / total;
  return p;
}

inline double loss_mass(std::span<const double> dist, const LossVector& loss) {
  KahanSum acc;
  for (std::size_t i = 0; i < dist.size(); ++i)
    if (loss[i]) acc.add(dist[i]);
  return acc.value();
}

inline void require_smooth_reference(std::span<const double> d_ref, double epsilon,
                                     std::size_t m) {
  if (d_ref.size() != m) throw ConfigError("reference distribution has the wrong size");
  const double cap = 1.0 / (epsilon * static_cast<double>(m)) + 1e-9;
  KahanSum total;
  for (const double p : d_ref) {
    if (!(p >= 0.0) || p > cap)
      throw ConfigError("reference distribution is not epsilon-smooth");
    total.add(p);
  }
  if (std::abs(total.value() - 1.0) > 1e-9)
    throw ConfigError("reference distribution does not sum to 1");
}

}  // namespace detail

// Per-iteration decomposition of the potential RE(D_ref || D^t) into the
// multiplicative-update step and the projection step, checked against the
// proven per-step bounds:
//   update:     log Z_t - <D_ref,l^t> log(1-gamma)
//               <= gamma ((1+gamma) <D_ref,l^t> - <D^t,l^t>)
//   projection: RE(D_ref||post) - RE(D_ref||pre) <= zeta
// The projection delta is zero off-schedule by construction (the distribution
// does not change), which the telescoping residual also confirms: summing all
// deltas must reproduce RE against the final measure exactly.
struct PotentialReport {
  std::size_t iterations = 0;
  std::size_t projection_events = 0;
  std::size_t update_violations = 0;
  std::size_t projection_violations = 0;
  double worst_update_slack = std::numeric_limits<double>::infinity();
  double worst_projection_slack = std::numeric_limits<double>::infinity();
  // projection increase measured against the exact projection of the same
  // pre-measure: RE(D_ref||post) <= RE(D_ref||exact) + zeta
  double worst_exact_slack = std::numeric_limits<double>::infinity();
  std::size_t first_violation_iteration = 0;
  double telescope_residual = std::numeric_limits<double>::quiet_NaN();

  bool pass() const { return update_violations == 0 && projection_violations == 0; }
};

inline PotentialReport potential_diagnostics(const RunRecord& rec,
                                             std::span<const double> d_ref,
                                             std::span<const double> final_measure,
                                             double tolerance = 1e-8) {
  detail::require_smooth_reference(d_ref, rec.epsilon, rec.m);
  if (rec.projection_traces.size() != rec.projections)
    throw ConfigError("potential diagnostics requires a dense-trace run");

  PotentialReport report;
  report.iterations = rec.rows.size();
  const double gamma = rec.gamma;
  const double log_decay = std::log(1.0 - gamma);
  KahanSum telescoped;
  std::size_t trace_idx = 0;

  for (std::size_t idx = 0; idx < rec.rows.size(); ++idx) {
    const auto& row = rec.rows[idx];
    const LossVector& loss = rec.losses[idx];
    const double ref_loss = detail::loss_mass(d_ref, loss);
    const double z = 1.0 - gamma * row.advantage;
    const double delta_update = std::log(z) - ref_loss * log_decay;
    const double update_bound = gamma * ((1.0 + gamma) * ref_loss - row.advantage);
    const double update_slack = update_bound - delta_update;
    report.worst_update_slack = std::min(report.worst_update_slack, update_slack);
    if (update_slack < -tolerance) {
      if (report.update_violations == 0 && report.projection_violations == 0)
        report.first_violation_iteration = row.t;
      ++report.update_violations;
    }
    telescoped.add(delta_update);

    if (row.projected) {
      const auto& trace = rec.projection_traces.at(trace_idx++);
      const auto pre = detail::normalize_dense(trace.pre);
      const auto post = detail::normalize_dense(trace.post);
      const double re_pre = relative_entropy(d_ref, pre);
      const double re_post = relative_entropy(d_ref, post);
      const double delta_proj = re_post - re_pre;
      const double proj_slack = rec.zeta - delta_proj;
      report.worst_projection_slack = std::min(report.worst_projection_slack, proj_slack);
      if (proj_slack < -tolerance) {
        if (report.update_violations == 0 && report.projection_violations == 0)
          report.first_violation_iteration = row.t;
        ++report.projection_violations;
      }
      if (!trace.exact.empty()) {
        const auto exact = detail::normalize_dense(trace.exact);
        const double re_exact = relative_entropy(d_ref, exact);
        report.worst_exact_slack =
            std::min(report.worst_exact_slack, rec.zeta - (re_post - re_exact));
      }
      telescoped.add(delta_proj);
      ++report.projection_events;
    }
  }

  // telescoping: Psi^{T+1} - Psi^1 must equal the summed deltas
  const std::vector<double> uniform(rec.m, 1.0 / static_cast<double>(rec.m));
  const double psi_first = relative_entropy(d_ref, uniform);
  const auto final_dist = detail::normalize_dense(final_measure);
  const double psi_last = relative_entropy(d_ref, final_dist);
  report.telescope_residual = (psi_last - psi_first) - telescoped.value();
  return report;
}

// Cumulative-loss comparison against a fixed smooth reference distribution:
//   sum_t <D^t,l^t> <= (1+gamma) sum_t <D_ref,l^t> + R*zeta/gamma
//                      + RE(D_ref||D^1)/gamma
// Holds for every sequence of Boolean loss vectors whenever every projection
// in the run satisfied its density window.
struct RegretReport {
  double algorithm_loss = 0.0;
  double reference_loss = 0.0;
  double bound = 0.0;
  double slack = 0.0;  // bound - algorithm_loss
  bool pass = false;
};

inline RegretReport check_regret_bound(const RunRecord& rec, std::span<const double> d_ref,
                                       double tolerance = 1e-6) {
  detail::require_smooth_reference(d_ref, rec.epsilon, rec.m);
  const double gamma = rec.gamma;
  RegretReport report;
  KahanSum algo_loss, ref_loss;
  for (std::size_t idx = 0; idx < rec.rows.size(); ++idx) {
    algo_loss.add(rec.rows[idx].advantage);
    ref_loss.add(detail::loss_mass(d_ref, rec.losses[idx]));
  }
  report.algorithm_loss = algo_loss.value();
  report.reference_loss = ref_loss.value();

  const std::vector<double> uniform(rec.m, 1.0 / static_cast<double>(rec.m));
  const double re_start = relative_entropy(d_ref, uniform);
  report.bound = (1.0 + gamma) * report.reference_loss +
                 static_cast<double>(rec.projections) * rec.zeta / gamma + re_start / gamma;
  report.slack = report.bound - report.algorithm_loss;
  report.pass = report.slack >= -tolerance;
  return report;
}

// Throwing variants for callers that treat a failed bound as an error.
inline PotentialReport assert_potential_bounds(const RunRecord& rec,
                                               std::span<const double> d_ref,
                                               std::span<const double> final_measure,
                                               double tolerance = 1e-8) {
  const auto report = potential_diagnostics(rec, d_ref, final_measure, tolerance);
  if (!report.pass())
    throw BoundViolation("potential decomposition bound failed",
                         report.first_violation_iteration);
  return report;
}

inline RegretReport assert_regret_bound(const RunRecord& rec, std::span<const double> d_ref,
                                        double tolerance = 1e-6) {
  const auto report = check_regret_bound(rec, d_ref, tolerance);
  if (!report.pass)
    throw BoundViolation("cumulative-loss bound failed", rec.rows.size());
  return report;
}

// Fills the delta_psi_* fields of the record rows against a reference
// distribution, for JSONL export of instrumented runs.
inline void annotate_potentials(RunRecord& rec, std::span<const double> d_ref) {
  detail::require_smooth_reference(d_ref, rec.epsilon, rec.m);
  const double log_decay = std::log(1.0 - rec.gamma);
  std::size_t trace_idx = 0;
  for (std::size_t idx = 0; idx < rec.rows.size(); ++idx) {
    auto& row = rec.rows[idx];
    const double ref_loss = detail::loss_mass(d_ref, rec.losses[idx]);
    row.delta_psi_update = std::log(1.0 - rec.gamma * row.advantage) - ref_loss * log_decay;
    if (row.projected && trace_idx < rec.projection_traces.size()) {
      const auto& trace = rec.projection_traces[trace_idx++];
      row.delta_psi_proj = relative_entropy(d_ref, detail::normalize_dense(trace.post)) -
                           relative_entropy(d_ref, detail::normalize_dense(trace.pre));
    } else {
      row.delta_psi_proj = 0.0;
    }
  }
}

}  // namespace boostlab
