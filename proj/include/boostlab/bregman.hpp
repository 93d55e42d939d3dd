#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "boostlab/errors.hpp"
#include "boostlab/measure.hpp"
#include "boostlab/numeric.hpp"
#include "boostlab/quantum.hpp"
#include "boostlab/rng.hpp"

namespace boostlab {

// Target of an approximate projection: density at least epsilon, overshoot
// at most a (1+zeta) factor.
struct DensityTarget {
  double epsilon;
  double zeta;

  DensityTarget(double eps, double z) : epsilon(eps), zeta(z) {
    if (!(epsilon > 0.0) || epsilon >= 1.0) throw ConfigError("epsilon must lie in (0,1)");
    if (!(zeta > 0.0) || zeta >= 0.5) throw ConfigError("zeta must lie in (0, 0.5)");
  }
};

// density of min(1, c*w)
inline double capped_density(std::span<const double> w, double c) {
  KahanSum acc;
  for (const double v : w) acc.add(std::min(1.0, c * v));
  return acc.value() / static_cast<double>(w.size());
}

namespace detail {

inline constexpr int kMaxDoublings = 60;

// Smallest c >= lo with capped density >= epsilon, bisected to `tol`.
// The map c -> density(min(1, c*w)) is nondecreasing, continuous and
// piecewise linear, so plain bisection on the bracket is well conditioned.
template <class DensityFn>
double bisect_constant(DensityFn&& dens, double lo, double hi, double epsilon, double tol) {
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (dens(mid) >= epsilon)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

}  // namespace detail

// Smallest c >= 1 such that min(1, c*N) has density epsilon. Requires at
// least epsilon*m strictly positive entries; otherwise no finite c reaches
// the target and the call fails.
inline double exact_projection_constant(const Measure& n, double epsilon) {
  if (!(epsilon > 0.0) || epsilon >= 1.0) throw ConfigError("epsilon must lie in (0,1)");
  const auto w = n.entries();
  const auto m = static_cast<double>(w.size());
  std::size_t support = 0;
  for (const double v : w)
    if (v > 0.0) ++support;
  if (n.density() >= epsilon) return 1.0;
  if (static_cast<double>(support) < epsilon * m - 1e-12)
    throw Infeasible("support smaller than epsilon*m: no scaling reaches the target density");

  double hi = 2.0;
  int doublings = 0;
  while (capped_density(w, hi) < epsilon) {
    hi *= 2.0;
    if (++doublings > detail::kMaxDoublings)
      throw Infeasible("projection constant exceeds the doubling cap");
  }
  const double lo = std::max(1.0, hi / 2.0);
  return detail::bisect_constant([&](double c) { return capped_density(w, c); }, lo, hi,
                                 epsilon, 1e-12);
}

// KL-closest member of the density-epsilon polytope: min(1, c*N) entrywise.
inline Measure project_exact(const Measure& n, double epsilon) {
  const double c = exact_projection_constant(n, epsilon);
  std::vector<double> out(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) out[i] = std::min(1.0, c * n[i]);
  return Measure(std::move(out));
}

// Implicit representation of an approximate projection: the constant alone,
// plus bookkeeping from the search that produced it.
struct ApproxProjection {
  double c_tilde = 1.0;
  double density_estimate = 0.0;
  std::size_t steps = 0;               // estimator invocations
  std::uint64_t estimator_queries = 0; // ledger delta across the search

  nlohmann::json to_json() const {
    return nlohmann::json{{"c_tilde", c_tilde},
                          {"density_estimate", density_estimate},
                          {"steps", steps},
                          {"estimator_queries", estimator_queries}};
  }
};

// Binary search for a constant c~ such that the *estimated* density of
// min(1, c~*N) lands in [eps(1+zeta/4), eps(1+3*zeta/4)]. With the
// estimator's multiplicative error held to zeta/8, any accepted c~ has true
// density in [eps, (1+zeta)*eps]. The failure budget is split: half over the
// bracketing probes (at most kMaxDoublings+1 of them), half over the
// bisection steps.
template <class EntryFn>
ApproxProjection project_approx(EntryFn&& entry, std::size_t m, const DensityTarget& target,
                                MeanEstimator& estimator, double delta) {
  if (!(delta > 0.0) || delta >= 1.0) throw ConfigError("delta must lie in (0,1)");
  const double eps = target.epsilon;
  const double zeta = target.zeta;
  const double window_lo = eps * (1.0 + zeta / 4.0);
  const double window_hi = eps * (1.0 + 3.0 * zeta / 4.0);

  ApproxProjection result;
  const auto queries_before = [&] {
    const auto& led = estimator.ledger();
    return led.oracle_queries + led.grover_applications;
  };
  const std::uint64_t base_queries = queries_before();

  const auto probe = [&](double c, double step_delta) {
    ++result.steps;
    return estimator.estimate([&](std::size_t i) { return std::min(1.0, c * entry(i)); }, m,
                              step_delta);
  };
  const auto finish = [&](double c, double estimate) {
    result.c_tilde = c;
    result.density_estimate = estimate;
    result.estimator_queries = queries_before() - base_queries;
    return result;
  };

  const double bracket_delta = 0.5 * delta / (detail::kMaxDoublings + 1);

  // c = 1 first: if the measure is already dense enough, the projection is
  // the identity and c~ = 1 is exact.
  const double d1 = probe(1.0, bracket_delta);
  if (d1 >= window_lo) return finish(1.0, d1);

  double c_lo = 1.0;
  double c_hi = 2.0;
  for (int k = 0;; ++k) {
    if (k > detail::kMaxDoublings)
      throw Infeasible("no density-reaching constant within the doubling cap");
    const double dh = probe(c_hi, bracket_delta);
    if (dh >= window_lo && dh <= window_hi) return finish(c_hi, dh);
    if (dh > window_hi) break;
    c_lo = c_hi;
    c_hi *= 2.0;
  }

  const auto budget = static_cast<std::size_t>(
      std::ceil(std::log2(c_hi * 8.0 / (eps * zeta))));
  const double step_delta = 0.5 * delta / static_cast<double>(budget);
  for (std::size_t s = 0; s < budget; ++s) {
    const double mid = 0.5 * (c_lo + c_hi);
    const double dm = probe(mid, step_delta);
    if (dm >= window_lo && dm <= window_hi) return finish(mid, dm);
    if (dm < window_lo)
      c_lo = mid;
    else
      c_hi = mid;
  }
  throw EstimatorFailure("binary search exhausted its step budget without an acceptable density",
                         result.steps);
}

// Random member of the density-epsilon polytope supported inside the support
// of `reference`: random entries capped at 1 and rescaled until the density
// is exactly epsilon.
inline Measure sample_high_density_measure(const Measure& reference, double epsilon, Rng& rng) {
  const std::size_t m = reference.size();
  std::vector<double> u(m, 0.0);
  std::size_t support = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (reference[i] > 0.0) {
      u[i] = rng.next_double(0.05, 1.0);
      ++support;
    }
  }
  if (static_cast<double>(support) < epsilon * static_cast<double>(m))
    throw Infeasible("reference support too small to host a density-epsilon measure");
  double hi = 1.0;
  while (capped_density(u, hi) < epsilon) hi *= 2.0;
  const double c = detail::bisect_constant([&](double s) { return capped_density(u, s); },
                                           0.0, hi, epsilon, 1e-13);
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) out[i] = std::min(1.0, c * u[i]);
  return Measure(std::move(out));
}

// Report of a randomized check of the approximation property:
//   (1) the candidate lies in the density polytope, and
//   (2) KL(M||candidate) <= KL(M||exact) + alpha for sampled M.
struct ApproxCheckReport {
  bool density_ok = false;
  double density = 0.0;
  double worst_slack = 0.0;  // max over sampled M of KL(M||approx) - KL(M||exact)
  std::size_t samples = 0;
  double alpha = 0.0;

  bool pass() const { return density_ok && worst_slack <= alpha + 1e-9; }
};

// Samples random polytope members (plus the deliberate extremes: the
// uniform-epsilon measure, an indicator-style measure, and the exact
// projection itself, where the KL objective tends to be maximized) and
// reports the worst observed slack.
inline ApproxCheckReport verify_approx_definition(const Measure& approx, const Measure& exact,
                                                  const Measure& pre, double epsilon,
                                                  double alpha, std::size_t samples,
                                                  std::uint64_t seed) {
  const std::size_t m = pre.size();
  if (approx.size() != m || exact.size() != m)
    throw ConfigError("measures must share an index set");
  ApproxCheckReport report;
  report.alpha = alpha;
  report.density = approx.density();
  report.density_ok = report.density >= epsilon - 1e-12;
  report.worst_slack = -std::numeric_limits<double>::infinity();

  Rng rng(seed);
  std::vector<Measure> candidates;
  candidates.reserve(samples + 3);
  // extremes
  {
    std::vector<double> uni(m, 0.0);
    std::size_t support = 0;
    for (std::size_t i = 0; i < m; ++i)
      if (pre[i] > 0.0) ++support;
    const double level = std::min(1.0, epsilon * static_cast<double>(m) /
                                           static_cast<double>(support));
    for (std::size_t i = 0; i < m; ++i)
      if (pre[i] > 0.0) uni[i] = level;
    candidates.emplace_back(std::move(uni));

    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < m; ++i)
      if (pre[i] > 0.0) order.push_back(i);
    shuffle(order, rng);
    const auto ones = static_cast<std::size_t>(
        std::ceil(epsilon * static_cast<double>(m)));
    std::vector<double> ind(m, 0.0);
    for (std::size_t i = 0; i < std::min(ones, order.size()); ++i) ind[order[i]] = 1.0;
    candidates.emplace_back(std::move(ind));

    candidates.push_back(exact);
  }
  for (std::size_t s = 0; s < samples; ++s)
    candidates.push_back(sample_high_density_measure(pre, epsilon, rng));

  for (const auto& cand : candidates) {
    const double slack = kl_measures(cand, approx) - kl_measures(cand, exact);
    report.worst_slack = std::max(report.worst_slack, slack);
  }
  report.samples = candidates.size();
  return report;
}

}  // namespace boostlab
