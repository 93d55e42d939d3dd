#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "boostlab/bregman.hpp"
#include "boostlab/diagnostics.hpp"
#include "boostlab/engine.hpp"
#include "boostlab/learners.hpp"
#include "boostlab/measure.hpp"
#include "boostlab/numeric.hpp"
#include "boostlab/quantum.hpp"
#include "boostlab/rng.hpp"
#include "boostlab/tasks.hpp"

namespace boostlab {

// Grover-application budget constant asserted for the simulated-quantum mean
// estimator: per call, grover_applications <= kMeanQueryConstant *
// ln(1/delta) / (sqrt(mu_floor) * zeta).
inline constexpr double kMeanQueryConstant = 160.0;

struct CheckResult {
  std::string name;
  bool pass = false;
  double worst = 0.0;   // worst observed slack/residual/frequency, check-specific
  std::string detail;

  nlohmann::json to_json() const {
    return nlohmann::json{
        {"name", name}, {"pass", pass}, {"worst", worst}, {"detail", detail}};
  }
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckResult> checks;

  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }

  nlohmann::json to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : checks) arr.push_back(c.to_json());
    return nlohmann::json{{"suite", suite}, {"pass", pass()}, {"checks", arr}};
  }

  void print(std::ostream& out) const {
    for (const auto& c : checks) {
      out << (c.pass ? "[PASS] " : "[FAIL] ") << suite << '/' << c.name;
      if (!c.detail.empty()) out << "  (" << c.detail << ')';
      out << '\n';
    }
  }
};

namespace verify_detail {

inline std::string fmt(double v) {
  std::ostringstream ss;
  ss << std::setprecision(6) << v;
  return ss.str();
}

inline Measure random_measure(std::size_t m, Rng& rng, double lo = 1e-3, double hi = 1.0,
                              double zero_fraction = 0.0) {
  std::vector<double> w(m);
  for (auto& v : w)
    v = (zero_fraction > 0.0 && rng.next_double() < zero_fraction)
            ? 0.0
            : rng.next_double(lo, hi);
  return Measure(std::move(w));
}

// Instance with density strictly below epsilon, so the projection search is
// exercised; entries are kept away from degenerate scales.
struct ProjectionInstance {
  Measure n;
  double epsilon;
};

inline ProjectionInstance random_projection_instance(Rng& rng, std::size_t max_m) {
  const std::size_t m = 16 + static_cast<std::size_t>(rng.next_below(max_m - 15));
  const double eps = rng.next_double(0.2, 0.6);
  std::vector<double> u(m);
  for (auto& v : u) v = rng.next_double(0.02, 0.95);
  const double target = eps * rng.next_double(0.35, 0.8);
  // rescale to the target density, capping at 1
  double hi = 1.0;
  while (capped_density(u, hi) < target) hi *= 2.0;
  const double s = detail::bisect_constant(
      [&](double c) { return capped_density(u, c); }, 0.0, hi, target, 1e-13);
  for (auto& v : u) v = std::min(1.0, s * v);
  return {Measure(std::move(u)), eps};
}

// Independent oracle: plain-summation density, fixed-count bisection.
inline double oracle_projection_constant(std::span<const double> w, double eps) {
  const auto dens = [&](double c) {
    double s = 0.0;
    for (const double v : w) s += std::min(1.0, c * v);
    return s / static_cast<double>(w.size());
  };
  if (dens(1.0) >= eps) return 1.0;
  double lo = 1.0, hi = 2.0;
  int guard = 0;
  while (dens(hi) < eps) {
    hi *= 2.0;
    if (++guard > 70) throw Infeasible("oracle: unreachable density");
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (dens(mid) >= eps)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

inline double plain_weight(std::span<const double> w, double c) {
  double s = 0.0;
  for (const double v : w) s += std::min(1.0, c * v);
  return s;
}

// Smooth reference distribution: either the normalization of a random
// polytope member, or a uniform distribution over a random subset of size
// ceil(eps*m) (the shape that drives the misclassified-set argument).
inline std::vector<double> random_smooth_reference(std::size_t m, double eps, Rng& rng) {
  if (rng.next_double() < 0.5) {
    const Measure member =
        sample_high_density_measure(Measure::uniform(m, 1.0), eps, rng);
    const double total = member.weight();
    std::vector<double> p(m);
    for (std::size_t i = 0; i < m; ++i) p[i] = member[i] / total;
    return p;
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  shuffle(order, rng);
  const auto size = static_cast<std::size_t>(
      std::ceil(eps * static_cast<double>(m)));
  std::vector<double> p(m, 0.0);
  for (std::size_t i = 0; i < size; ++i) p[order[i]] = 1.0 / static_cast<double>(size);
  return p;
}

}  // namespace verify_detail

// ---- identities -----------------------------------------------------------

// Residual of KL(A||B) against its decomposition through normalized
// distributions; must vanish on every valid pair.
inline CheckResult check_kl_re_residual(std::size_t trials, std::size_t max_m,
                                        std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const std::size_t m = 2 + static_cast<std::size_t>(rng.next_below(max_m - 1));
    const Measure b = verify_detail::random_measure(m, rng, 1e-3, 1.0);
    Measure a = verify_detail::random_measure(m, rng, 0.0, 1.0, 0.15);
    worst = std::max(worst, std::abs(kl_re_identity_residual(a, b)));
  }
  return {"kl_re_residual", worst <= 1e-10,
          worst, "worst |residual| = " + verify_detail::fmt(worst) + " over " +
                     std::to_string(trials) + " pairs"};
}

inline CheckResult check_divergence_nonnegativity(std::size_t trials, std::uint64_t seed) {
  Rng rng(seed);
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const std::size_t m = 2 + static_cast<std::size_t>(rng.next_below(255));
    const Measure b = verify_detail::random_measure(m, rng, 1e-3, 1.0);
    const Measure a = verify_detail::random_measure(m, rng, 1e-3, 1.0);
    worst = std::min(worst, kl_measures(a, b));
    const auto da = normalize(a, 1e-6);
    const auto db = normalize(b, 1e-6);
    worst = std::min(worst, relative_entropy(da, db));
  }
  return {"divergence_nonnegativity", worst >= -1e-12, worst,
          "smallest divergence = " + verify_detail::fmt(worst)};
}

// KL between measures is 1-homogeneous: KL(cA||cB) = c KL(A||B).
inline CheckResult check_divergence_scaling(std::size_t trials, std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const std::size_t m = 2 + static_cast<std::size_t>(rng.next_below(255));
    const Measure a = verify_detail::random_measure(m, rng, 1e-3, 1.0);
    const Measure b = verify_detail::random_measure(m, rng, 1e-3, 1.0);
    const double c = rng.next_double(0.05, 1.0);
    std::vector<double> ca(m), cb(m);
    for (std::size_t i = 0; i < m; ++i) {
      ca[i] = c * a[i];
      cb[i] = c * b[i];
    }
    const double lhs = kl_measures(Measure(std::move(ca)), Measure(std::move(cb)));
    const double rhs = c * kl_measures(a, b);
    worst = std::max(worst, std::abs(lhs - rhs) / (1.0 + std::abs(rhs)));
  }
  return {"divergence_scaling", worst <= 1e-10, worst,
          "worst relative mismatch = " + verify_detail::fmt(worst)};
}

// Any measure of density >= eps normalizes to an eps-smooth distribution.
inline CheckResult check_smoothness_certificate(std::size_t trials, std::uint64_t seed) {
  Rng rng(seed);
  std::size_t failures = 0;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const std::size_t m = 4 + static_cast<std::size_t>(rng.next_below(253));
    const Measure mm = verify_detail::random_measure(m, rng, 0.05, 1.0);
    const double eps = mm.density() * rng.next_double(0.2, 1.0);
    try {
      (void)normalize(mm, eps);
    } catch (const Error&) {
      ++failures;
    }
  }
  return {"smoothness_certificate", failures == 0, static_cast<double>(failures),
          std::to_string(trials - failures) + "/" + std::to_string(trials) + " certified"};
}

// ---- projections ----------------------------------------------------------

inline CheckResult check_projection_oracle(std::size_t instances, std::size_t max_m,
                                           std::uint64_t seed) {
  Rng rng(seed);
  double worst_dc = 0.0;
  double worst_weight = 0.0;
  for (std::size_t k = 0; k < instances; ++k) {
    const auto inst = verify_detail::random_projection_instance(rng, max_m);
    const double c_impl = exact_projection_constant(inst.n, inst.epsilon);
    const double c_oracle =
        verify_detail::oracle_projection_constant(inst.n.entries(), inst.epsilon);
    worst_dc = std::max(worst_dc, std::abs(c_impl - c_oracle));
    const double w_impl = project_exact(inst.n, inst.epsilon).weight();
    const double w_oracle = verify_detail::plain_weight(inst.n.entries(), c_oracle);
    worst_weight = std::max(
        worst_weight, std::abs(w_impl - w_oracle) / static_cast<double>(inst.n.size()));
  }
  const bool pass = worst_dc <= 1e-9 && worst_weight <= 1e-9;
  return {"projection_constant_oracle", pass, worst_dc,
          "worst |dc| = " + verify_detail::fmt(worst_dc) +
              ", worst weight err/m = " + verify_detail::fmt(worst_weight) + " over " +
              std::to_string(instances) + " instances"};
}

// KL(M||M*) + KL(M*||N) <= KL(M||N) for every polytope member M.
inline CheckResult check_pythagorean(std::size_t instances, std::size_t samples_per,
                                     std::uint64_t seed) {
  Rng rng(seed);
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < instances; ++k) {
    const auto inst = verify_detail::random_projection_instance(rng, 256);
    const Measure star = project_exact(inst.n, inst.epsilon);
    for (std::size_t s = 0; s < samples_per; ++s) {
      const Measure m = sample_high_density_measure(inst.n, inst.epsilon, rng);
      const double slack =
          kl_measures(m, inst.n) - kl_measures(m, star) - kl_measures(star, inst.n);
      worst = std::min(worst, slack);
    }
  }
  return {"pythagorean_inequality", worst >= -1e-9, worst,
          "worst slack = " + verify_detail::fmt(worst)};
}

inline CheckResult check_projection_idempotent(std::size_t instances, std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (std::size_t k = 0; k < instances; ++k) {
    const auto inst = verify_detail::random_projection_instance(rng, 256);
    const Measure once = project_exact(inst.n, inst.epsilon);
    const Measure twice = project_exact(once, inst.epsilon);
    for (std::size_t i = 0; i < once.size(); ++i)
      worst = std::max(worst, std::abs(once[i] - twice[i]));
  }
  return {"projection_idempotent", worst <= 1e-10, worst,
          "worst entry drift = " + verify_detail::fmt(worst)};
}

// With an exact density oracle the accepted constant always realizes a
// density inside [eps, (1+zeta)*eps].
inline CheckResult check_window_exact(std::size_t instances, std::uint64_t seed) {
  Rng rng(seed);
  std::size_t hits = 0;
  double worst_overshoot = 0.0;
  for (std::size_t k = 0; k < instances; ++k) {
    const auto inst = verify_detail::random_projection_instance(rng, 256);
    const double zeta = rng.next_double(0.05, 0.3);
    MeanEstimator est(EstimatorMode::ExactPass, zeta / 8.0, 0.1, inst.epsilon / 2.0,
                      rng.next_u64());
    const auto proj = project_approx([&](std::size_t i) { return inst.n[i]; },
                                     inst.n.size(), DensityTarget(inst.epsilon, zeta), est,
                                     0.1);
    const double realized = capped_density(inst.n.entries(), proj.c_tilde);
    const bool ok =
        realized >= inst.epsilon - 1e-12 && realized <= (1.0 + zeta) * inst.epsilon + 1e-12;
    if (ok) ++hits;
    worst_overshoot = std::max(worst_overshoot, realized / inst.epsilon - 1.0);
  }
  return {"density_window_exact_oracle", hits == instances,
          static_cast<double>(hits) / static_cast<double>(instances),
          std::to_string(hits) + "/" + std::to_string(instances) + " in window"};
}

inline CheckResult check_window_quantum(std::size_t trials, double delta,
                                        std::uint64_t seed) {
  Rng rng(seed);
  std::size_t hits = 0;
  bool budget_ok = true;
  double worst_budget_ratio = 0.0;
  for (std::size_t k = 0; k < trials; ++k) {
    const auto inst = verify_detail::random_projection_instance(rng, 256);
    const double zeta = rng.next_double(0.1, 0.3);
    MeanEstimator est(EstimatorMode::SimulatedQuantum, zeta / 8.0, delta,
                      inst.epsilon / 2.0, rng.next_u64());
    try {
      const auto proj = project_approx([&](std::size_t i) { return inst.n[i]; },
                                       inst.n.size(), DensityTarget(inst.epsilon, zeta),
                                       est, delta);
      const double realized = capped_density(inst.n.entries(), proj.c_tilde);
      if (realized >= inst.epsilon - 1e-12 &&
          realized <= (1.0 + zeta) * inst.epsilon + 1e-12)
        ++hits;
      // per-estimate query budget at the smallest per-step failure share
      // the search may hand the estimator
      const double delta_min = 0.5 * delta / 61.0;
      const double budget = kMeanQueryConstant * std::log(1.0 / delta_min) /
                            (std::sqrt(inst.epsilon / 2.0) * (zeta / 8.0));
      const double per_estimate = static_cast<double>(est.ledger().grover_applications) /
                                  static_cast<double>(proj.steps);
      worst_budget_ratio = std::max(worst_budget_ratio, per_estimate / budget);
      if (per_estimate > budget) budget_ok = false;
    } catch (const EstimatorFailure&) {
      // counts as a failed trial
    }
  }
  const double freq = static_cast<double>(hits) / static_cast<double>(trials);
  return {"density_window_quantum_estimator", freq >= 1.0 - delta && budget_ok, freq,
          "window frequency " + verify_detail::fmt(freq) + " over " +
              std::to_string(trials) + " trials at delta " + verify_detail::fmt(delta) +
              "; per-estimate queries at " + verify_detail::fmt(worst_budget_ratio) +
              " of budget"};
}

// The searched constant represents a measure that approximates the exact
// projection in divergence: sampled slack at most zeta*eps*m.
inline CheckResult check_approx_definition(std::size_t instances, std::uint64_t seed) {
  Rng rng(seed);
  double worst_excess = -std::numeric_limits<double>::infinity();
  bool all_density_ok = true;
  for (std::size_t k = 0; k < instances; ++k) {
    const auto inst = verify_detail::random_projection_instance(rng, 128);
    const double zeta = rng.next_double(0.1, 0.3);
    MeanEstimator est(EstimatorMode::ExactPass, zeta / 8.0, 0.1, inst.epsilon / 2.0,
                      rng.next_u64());
    const auto proj = project_approx([&](std::size_t i) { return inst.n[i]; },
                                     inst.n.size(), DensityTarget(inst.epsilon, zeta), est,
                                     0.1);
    std::vector<double> approx(inst.n.size());
    for (std::size_t i = 0; i < approx.size(); ++i)
      approx[i] = std::min(1.0, proj.c_tilde * inst.n[i]);
    const Measure exact = project_exact(inst.n, inst.epsilon);
    const double alpha = zeta * inst.epsilon * static_cast<double>(inst.n.size());
    const auto report = verify_approx_definition(Measure(std::move(approx)), exact, inst.n,
                                                 inst.epsilon, alpha, 32, rng.next_u64());
    all_density_ok = all_density_ok && report.density_ok;
    worst_excess = std::max(worst_excess, report.worst_slack - alpha);
  }
  const bool pass = all_density_ok && worst_excess <= 1e-9;
  return {"approx_definition_slack", pass, worst_excess,
          "worst slack excess over zeta*eps*m = " + verify_detail::fmt(worst_excess)};
}

// ---- estimators -----------------------------------------------------------

inline CheckResult check_amplitude_on_grid(std::uint64_t seed) {
  Rng rng(seed);
  QueryLedger ledger;
  double worst = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    worst = std::max(worst, std::abs(amplitude_estimate(0.0, 16, 0.1, rng, &ledger)));
    worst = std::max(worst,
                     std::abs(amplitude_estimate(1.0, 16, 0.1, rng, &ledger) - 1.0));
    const double a = std::sin(std::numbers::pi / 8.0) * std::sin(std::numbers::pi / 8.0);
    // accuracy 8 -> readout grid 16; the eigenphase sits on grid point 2
    worst = std::max(worst, std::abs(amplitude_estimate(a, 8, 0.1, rng, &ledger) -
                                     std::sin(std::numbers::pi / 8.0)));
  }
  return {"amplitude_on_grid", worst <= 1e-15, worst,
          "worst on-grid deviation = " + verify_detail::fmt(worst)};
}

inline CheckResult check_amplitude_off_grid(std::size_t trials, double delta,
                                            std::uint64_t seed) {
  Rng rng(seed);
  const double as[] = {0.05, 0.2, 0.3, 0.5, 0.7373, 0.91};
  const std::uint64_t accuracy = 16;
  double worst_freq = 1.0;
  for (const double a : as) {
    std::size_t hits = 0;
    for (std::size_t k = 0; k < trials; ++k) {
      const double lambda = amplitude_estimate(a, accuracy, delta, rng, nullptr);
      if (std::abs(lambda - std::sqrt(a)) <= 1.0 / static_cast<double>(accuracy)) ++hits;
    }
    worst_freq = std::min(worst_freq,
                          static_cast<double>(hits) / static_cast<double>(trials));
  }
  return {"amplitude_off_grid", worst_freq >= 1.0 - delta, worst_freq,
          "worst success frequency " + verify_detail::fmt(worst_freq) + " at 1/A accuracy"};
}

// Single-repetition hit rate of the 1/A band is at least 8/pi^2.
inline CheckResult check_amplitude_single_run(std::size_t trials, std::uint64_t seed) {
  Rng rng(seed);
  const double a = 0.3;
  const std::uint64_t accuracy = 16;
  std::size_t hits = 0;
  for (std::size_t k = 0; k < trials; ++k) {
    // delta = 0.95 yields a single repetition: the median is one raw sample
    const double lambda = amplitude_estimate(a, accuracy, 0.95, rng, nullptr);
    if (std::abs(lambda - std::sqrt(a)) <= 1.0 / static_cast<double>(accuracy)) ++hits;
  }
  const double freq = static_cast<double>(hits) / static_cast<double>(trials);
  const double bound = 8.0 / (std::numbers::pi * std::numbers::pi) - 0.02;
  return {"amplitude_single_run", freq >= bound, freq,
          "single-run hit rate " + verify_detail::fmt(freq) + " >= " +
              verify_detail::fmt(bound)};
}

inline CheckResult check_mean_exact(std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 16 + static_cast<std::size_t>(rng.next_below(2033));
    std::vector<double> xs(n);
    for (auto& v : xs) v = rng.next_double();
    MeanEstimator est(EstimatorMode::ExactPass, 0.1, 0.1, 1e-6, rng.next_u64());
    const double got = est.estimate([&](std::size_t i) { return xs[i]; }, n);
    KahanSum acc;
    for (const double v : xs) acc.add(v);
    const double want = acc.value() / static_cast<double>(n);
    worst = std::max(worst, std::abs(got - want));
  }
  return {"mean_exact_pass", worst == 0.0, worst, "exact pass equals compensated mean"};
}

// Success frequency and per-call query budget of the simulated-quantum mean.
inline CheckResult check_mean_quantum(std::size_t trials, std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t n = 1024;
  const double mu_target = 0.3;
  const double floor = 0.25;
  const double zeta = 0.25;
  const double delta = 0.1;

  std::vector<double> xs(n);
  for (auto& v : xs) v = rng.next_double(0.0, 0.9);
  KahanSum acc;
  for (const double v : xs) acc.add(v);
  const double scale = mu_target / (acc.value() / static_cast<double>(n));
  for (auto& v : xs) v = std::min(1.0, v * scale);
  KahanSum acc2;
  for (const double v : xs) acc2.add(v);
  const double mu = acc2.value() / static_cast<double>(n);

  MeanEstimator est(EstimatorMode::SimulatedQuantum, zeta, delta, floor, rng.next_u64());
  std::size_t hits = 0;
  std::uint64_t max_queries = 0;
  for (std::size_t k = 0; k < trials; ++k) {
    const std::uint64_t before = est.ledger().grover_applications;
    const double got = est.estimate([&](std::size_t i) { return xs[i]; }, n);
    max_queries = std::max(max_queries, est.ledger().grover_applications - before);
    if (std::abs(got - mu) <= zeta * mu) ++hits;
  }
  const double freq = static_cast<double>(hits) / static_cast<double>(trials);
  const double budget =
      kMeanQueryConstant * std::log(1.0 / delta) / (std::sqrt(floor) * zeta);
  const bool pass = freq >= 1.0 - delta && static_cast<double>(max_queries) <= budget;
  return {"mean_quantum", pass, freq,
          "success " + verify_detail::fmt(freq) + ", max queries/call " +
              std::to_string(max_queries) + " <= budget " + verify_detail::fmt(budget) +
              " (C = " + verify_detail::fmt(kMeanQueryConstant) + ")"};
}

// Halving the floor must scale per-call queries by sqrt(2) within 25%,
// measured as a trend over a 16-point sweep.
inline CheckResult check_mean_query_scaling(std::uint64_t seed) {
  Rng rng(seed);
  const double zeta = 0.25;
  std::vector<double> ks, logq;
  for (int k = 0; k < 16; ++k) {
    const double floor = 0.5 / std::pow(2.0, k);
    const double mu = std::min(1.0, 1.2 * floor);
    MeanEstimator est(EstimatorMode::SimulatedQuantum, zeta, 0.1, floor, rng.next_u64());
    (void)est.estimate([&](std::size_t) { return mu; }, 256);
    ks.push_back(static_cast<double>(k));
    logq.push_back(std::log2(static_cast<double>(est.ledger().grover_applications)));
  }
  const double slope = fit_slope(ks, logq);  // log2 queries per halving
  const double per_halving = std::pow(2.0, slope);
  const double lo = std::numbers::sqrt2 * 0.75;
  const double hi = std::numbers::sqrt2 * 1.25;
  return {"mean_query_scaling", per_halving >= lo && per_halving <= hi, per_halving,
          "per-halving query factor " + verify_detail::fmt(per_halving) + " in [" +
              verify_detail::fmt(lo) + ", " + verify_detail::fmt(hi) + "]"};
}

inline CheckResult check_sampler_fidelity(std::uint64_t draws, std::uint64_t seed) {
  Rng rng(seed);
  const std::vector<double> weights = {1.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  const std::size_t m = weights.size();
  const double total = kahan_total(weights);
  QueryLedger ledger;
  std::vector<std::uint64_t> counts(m, 0);
  // weight floor 1.0 is a valid lower bound on |M| = 2
  for (std::uint64_t k = 0; k < draws; ++k)
    ++counts[prepare_smooth_sample([&](std::size_t i) { return weights[i]; }, m, 1.0,
                                   rng, ledger)];
  std::vector<double> expected(m);
  for (std::size_t i = 0; i < m; ++i) expected[i] = weights[i] / total;
  std::size_t dof = 0;
  const double stat = chi_square_stat(counts, expected, draws, &dof);
  const double p = chi_square_pvalue(stat, dof);
  const double freq0 = static_cast<double>(counts[0]) / static_cast<double>(draws);
  const bool pass = p > 0.01 && std::abs(freq0 - 0.5) <= 0.01;
  return {"sampler_fidelity", pass, p,
          "chi-square p = " + verify_detail::fmt(p) + ", heavy-index frequency " +
              verify_detail::fmt(freq0)};
}

inline CheckResult check_sampler_cost_model(std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t m = 50;
  std::vector<double> weights(m, 0.4);
  QueryLedger ledger;
  const double weight_floor = 0.1 * static_cast<double>(m);
  double worst = 0.0;
  double last_cost = 0.0;
  for (int k = 0; k < 200; ++k) {
    (void)prepare_smooth_sample([&](std::size_t i) { return weights[i]; }, m, weight_floor,
                                rng, ledger);
    const double delta_cost = ledger.modeled_quantum_cost - last_cost;
    last_cost = ledger.modeled_quantum_cost;
    worst = std::max(worst, std::abs(delta_cost - 4.0));  // ceil(1/sqrt(0.1)) = 4
  }
  return {"sampler_cost_model", worst == 0.0, worst,
          "modeled cost per sample equals ceil(1/sqrt(eps'))"};
}

inline CheckResult check_statevector(std::uint64_t seed) {
  Rng rng(seed);
  double worst_exact = 0.0;
  double worst_raw = 0.0;
  const auto run_case = [&](const std::vector<double>& xs, int bits) {
    const double got = statevector_crosscheck(xs, bits);
    const double scale = static_cast<double>(1ull << bits);
    KahanSum rounded, raw;
    for (const double v : xs) {
      rounded.add(static_cast<double>(std::llround(v * scale)) / scale);
      raw.add(v);
    }
    const double n = static_cast<double>(xs.size());
    worst_exact = std::max(worst_exact, std::abs(got - rounded.value() / n));
    worst_raw = std::max(worst_raw,
                         std::abs(got - raw.value() / n) - std::pow(2.0, -bits));
  };
  run_case(std::vector<double>(64, 1.0), 6);
  run_case(std::vector<double>(64, 0.0), 6);
  run_case({0.25, 0.75, 0.5, 0.5}, 8);
  for (const auto& [n, bits] : std::vector<std::pair<std::size_t, int>>{
           {1024, 8}, {4096, 5}, {64, 10}, {256, 10}}) {
    std::vector<double> xs(n);
    for (auto& v : xs) v = rng.next_double();
    run_case(xs, bits);
  }
  const bool pass = worst_exact <= 1e-12 && worst_raw <= 0.0;
  return {"statevector_crosscheck", pass, worst_exact,
          "worst deviation from discretized mean = " + verify_detail::fmt(worst_exact)};
}

// ---- run-based bound checks ------------------------------------------------

namespace verify_detail {

struct InstrumentedRun {
  TrainingSet data;
  RunResult result;
};

inline InstrumentedRun make_instrumented_run(double gamma, double eps, std::size_t m,
                                             std::size_t iterations, std::uint64_t seed,
                                             EstimatorMode mode = EstimatorMode::ExactPass) {
  SyntheticTask task;
  task.kind = TaskKind::JuntaMajority;
  task.n = 8;
  task.k = 3;
  task.seed = seed;
  InstrumentedRun out{generate_task(task, m), {}};
  PlantedWeakLearner learner(gamma, m, mix64(seed ^ 0x9e37));
  BoostConfig cfg;
  cfg.gamma = gamma;
  cfg.epsilon = eps;
  cfg.estimator_mode = mode;
  cfg.iterations_override = iterations;
  cfg.dense_trace = true;
  cfg.samples_override = 4;  // keep instrumented runs cheap
  cfg.seed = seed;
  out.result = run_quantumboost(out.data, learner, cfg);
  return out;
}

inline InstrumentedRun make_adversarial_run(double gamma, double eps, std::size_t m,
                                            std::size_t iterations, std::uint64_t seed) {
  SyntheticTask task;
  task.kind = TaskKind::Literal;
  task.n = 4;
  task.seed = seed;
  InstrumentedRun out{generate_task(task, m), {}};
  Rng rng(mix64(seed ^ 0x51ab));
  std::vector<LossVector> script(iterations);
  for (auto& loss : script) {
    loss.resize(m);
    for (auto& bit : loss) bit = rng.next_double() < 0.5 ? 1 : 0;
  }
  ScriptedLossLearner learner(std::move(script));
  BoostConfig cfg;
  cfg.gamma = gamma;
  cfg.epsilon = eps;
  cfg.iterations_override = iterations;
  cfg.dense_trace = true;
  cfg.contract = ContractPolicy::Warn;  // random losses hold no advantage promise
  cfg.samples_override = 0;
  cfg.seed = seed;
  out.result = run_quantumboost(out.data, learner, cfg);
  return out;
}

}  // namespace verify_detail

// Entrywise agreement between the implicit representation, materialized
// prefix by prefix, and an independently replayed dense trajectory.
inline CheckResult check_implicit_equivalence(std::size_t m, double gamma, double eps,
                                              std::size_t iterations, std::uint64_t seed) {
  const auto run = verify_detail::make_instrumented_run(gamma, eps, m, iterations, seed);
  const auto& rec = run.result.record;
  const auto& implicit = *run.result.implicit;

  // independent dense replay of the recorded schedule
  std::vector<double> dense(m, eps);
  ImplicitMeasure prefix(m, eps, gamma);
  double worst = 0.0;
  for (std::size_t idx = 0; idx < rec.rows.size(); ++idx) {
    const auto& loss = rec.losses[idx];
    for (std::size_t i = 0; i < m; ++i)
      if (loss[i]) dense[i] *= 1.0 - gamma;
    auto loss_ptr = std::make_shared<LossVector>(loss);
    if (rec.rows[idx].projected) {
      const double c = rec.rows[idx].c_tilde;
      for (std::size_t i = 0; i < m; ++i) dense[i] = std::min(1.0, c * dense[i]);
      prefix.append_update_and_project(loss_ptr, c);
    } else {
      prefix.append_update(loss_ptr);
    }
    const Measure mat = prefix.materialize();
    for (std::size_t i = 0; i < m; ++i)
      worst = std::max(worst, std::abs(mat[i] - dense[i]));
    // spot-check the O(t) single-entry path against the materialization
    const std::size_t probe = idx % m;
    worst = std::max(worst, std::abs(prefix.entry(probe) - mat[probe]));
  }
  // the engine's own trajectory must agree with the full materialization
  const Measure final_mat = implicit.materialize();
  for (std::size_t i = 0; i < m; ++i)
    worst = std::max(worst, std::abs(final_mat[i] - run.result.final_measure[i]));
  return {"implicit_dense_equivalence", worst <= 1e-10, worst,
          "worst entry deviation = " + verify_detail::fmt(worst) + " over " +
              std::to_string(rec.rows.size()) + " iterations, m = " + std::to_string(m)};
}

// Per-iteration potential bounds over instrumented runs and random smooth
// references; also checks the telescoped decomposition and that projection
// deltas only occur on schedule.
inline CheckResult check_potential_bounds(std::size_t runs, std::size_t refs_per_run,
                                          std::uint64_t seed) {
  Rng rng(seed);
  double worst_update = std::numeric_limits<double>::infinity();
  double worst_proj = std::numeric_limits<double>::infinity();
  double worst_telescope = 0.0;
  std::size_t violations = 0;
  for (std::size_t r = 0; r < runs; ++r) {
    const double gamma = rng.next_double(0.1, 0.3);
    const double eps = rng.next_double(0.08, 0.2);
    const std::size_t m = 120 + static_cast<std::size_t>(rng.next_below(180));
    const std::size_t iters = 40 + static_cast<std::size_t>(rng.next_below(60));
    const auto run =
        verify_detail::make_instrumented_run(gamma, eps, m, iters, rng.next_u64());
    for (std::size_t j = 0; j < refs_per_run; ++j) {
      const auto d_ref = verify_detail::random_smooth_reference(m, eps, rng);
      const auto report =
          potential_diagnostics(run.result.record, d_ref, run.result.final_measure);
      violations += report.update_violations + report.projection_violations;
      worst_update = std::min(worst_update, report.worst_update_slack);
      worst_proj = std::min(worst_proj, report.worst_projection_slack);
      worst_telescope = std::max(worst_telescope, std::abs(report.telescope_residual));
    }
  }
  const bool pass = violations == 0 && worst_telescope <= 1e-7;
  return {"potential_decomposition", pass, std::min(worst_update, worst_proj),
          "worst update slack " + verify_detail::fmt(worst_update) +
              ", worst projection slack " + verify_detail::fmt(worst_proj) +
              ", telescope residual " + verify_detail::fmt(worst_telescope)};
}

// At every projection: the relative entropy against any fixed smooth
// reference may rise by at most zeta, both against the pre-projection
// distribution and against the exact projection of the same measure.
inline CheckResult check_projection_re_window(std::size_t runs, std::uint64_t seed) {
  Rng rng(seed);
  double worst = std::numeric_limits<double>::infinity();
  std::size_t events = 0;
  for (std::size_t r = 0; r < runs; ++r) {
    const double gamma = rng.next_double(0.12, 0.3);
    const double eps = rng.next_double(0.08, 0.2);
    const std::size_t m = 120 + static_cast<std::size_t>(rng.next_below(280));
    const std::size_t iters = 30 + static_cast<std::size_t>(rng.next_below(90));
    const auto run =
        verify_detail::make_instrumented_run(gamma, eps, m, iters, rng.next_u64());
    const auto d_ref = verify_detail::random_smooth_reference(m, eps, rng);
    const auto report =
        potential_diagnostics(run.result.record, d_ref, run.result.final_measure);
    worst = std::min(worst, std::min(report.worst_projection_slack, report.worst_exact_slack));
    events += report.projection_events;
  }
  return {"projection_re_window", worst >= -1e-8, worst,
          "worst slack " + verify_detail::fmt(worst) + " over " + std::to_string(events) +
              " projection events"};
}

// Cumulative-loss bound on planted runs and on adversarial loss sequences.
inline CheckResult check_regret(std::size_t runs, std::uint64_t seed) {
  Rng rng(seed);
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < runs; ++r) {
    const double gamma = rng.next_double(0.1, 0.3);
    const double eps = rng.next_double(0.08, 0.2);
    const std::size_t m = 100 + static_cast<std::size_t>(rng.next_below(200));
    const std::size_t iters = 30 + static_cast<std::size_t>(rng.next_below(80));
    const auto run =
        (r % 2 == 0)
            ? verify_detail::make_instrumented_run(gamma, eps, m, iters, rng.next_u64())
            : verify_detail::make_adversarial_run(gamma, eps, m, iters, rng.next_u64());
    const auto d_ref = verify_detail::random_smooth_reference(m, eps, rng);
    const auto report = check_regret_bound(run.result.record, d_ref);
    worst = std::min(worst, report.slack);
  }
  return {"regret_bound", worst >= -1e-6, worst,
          "worst slack = " + verify_detail::fmt(worst) + " over " + std::to_string(runs) +
              " runs (planted and adversarial)"};
}

// Weight floor, entry cap, schedule shape and planted-advantage granularity
// over a batch of instrumented runs.
inline CheckResult check_run_invariants(std::size_t runs, std::uint64_t seed) {
  Rng rng(seed);
  bool ok = true;
  std::string detail;
  double worst_floor = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < runs; ++r) {
    const double gamma = rng.next_double(0.1, 0.3);
    const double eps = rng.next_double(0.08, 0.2);
    const std::size_t m = 150 + static_cast<std::size_t>(rng.next_below(250));
    const std::size_t iters = 40 + static_cast<std::size_t>(rng.next_below(80));
    const auto run =
        verify_detail::make_instrumented_run(gamma, eps, m, iters, rng.next_u64());
    const auto& rec = run.result.record;
    const std::size_t K = nudged_ceil(1.0 / gamma);
    const double floor =
        std::pow(1.0 - gamma, static_cast<double>(K)) * eps * static_cast<double>(m) -
        1e-9 * static_cast<double>(m);
    worst_floor = std::min(worst_floor, rec.min_weight - floor);
    if (rec.min_weight < floor) {
      ok = false;
      detail = "weight floor violated";
    }
    if (rec.projections != ceil_div(rec.rows.size(), K)) {
      ok = false;
      detail = "projection count off schedule";
    }
    const double granularity =
        1.0 / (eps * static_cast<double>(m) *
               std::pow(1.0 - gamma, static_cast<double>(K)));
    for (const auto& row : rec.rows) {
      const double advantage = row.advantage - 0.5;
      if (advantage < gamma - 1e-12 || advantage > gamma + granularity + 1e-12) {
        ok = false;
        detail = "planted advantage outside its granularity band";
      }
    }
    // post-projection weight lands in the density window [eps, (1+zeta)eps]
    for (std::size_t idx = 0; idx + 1 < rec.rows.size(); ++idx) {
      if (!rec.rows[idx].projected) continue;
      const double w_next = rec.rows[idx + 1].weight / static_cast<double>(m);
      if (w_next < eps - 1e-9 || w_next > (1.0 + rec.zeta) * eps + 1e-9) {
        ok = false;
        detail = "post-projection density outside its window";
      }
    }
    for (const double v : run.result.final_measure)
      if (v > 1.0) {
        ok = false;
        detail = "measure entry above 1";
      }
  }
  if (detail.empty())
    detail = "floor margin " + verify_detail::fmt(worst_floor) + " over " +
             std::to_string(runs) + " runs";
  return {"run_invariants", ok, worst_floor, detail};
}

// Eager baseline keeps every iteration's distribution epsilon-smooth.
inline CheckResult check_kale_smoothness(std::uint64_t seed) {
  SyntheticTask task;
  task.kind = TaskKind::JuntaMajority;
  task.n = 8;
  task.k = 3;
  task.seed = seed;
  const std::size_t m = 400;
  const auto data = generate_task(task, m);
  PlantedWeakLearner learner(0.15, m, mix64(seed));
  BoostConfig cfg;
  cfg.gamma = 0.15;
  cfg.epsilon = 0.1;
  cfg.iterations_override = 120;
  cfg.samples_override = 4;
  cfg.seed = seed;
  const auto result = run_kale_smoothboost(data, learner, cfg);
  double worst = 0.0;
  for (const auto& row : result.record.rows)
    worst = std::max(worst, row.max_smoothness - 1.0 / cfg.epsilon);
  const bool pass = worst <= 1e-9 && result.record.projections == result.record.rows.size();
  return {"kale_smoothness_trace", pass, worst,
          "worst smoothness excess over 1/eps = " + verify_detail::fmt(worst) +
              ", projections = " + std::to_string(result.record.projections)};
}

// ---- suites ----------------------------------------------------------------

inline SuiteReport verify_identities(std::size_t trials, std::uint64_t seed) {
  SeedStream seeds(seed);
  SuiteReport report;
  report.suite = "identities";
  report.checks.push_back(check_kl_re_residual(trials, 1024, seeds.derive("residual")));
  report.checks.push_back(
      check_divergence_nonnegativity(trials / 2 + 1, seeds.derive("nonneg")));
  report.checks.push_back(check_divergence_scaling(trials / 2 + 1, seeds.derive("scaling")));
  report.checks.push_back(
      check_smoothness_certificate(trials / 2 + 1, seeds.derive("smooth")));
  return report;
}

inline SuiteReport verify_projections(std::size_t trials, std::uint64_t seed) {
  SeedStream seeds(seed);
  SuiteReport report;
  report.suite = "projections";
  report.checks.push_back(
      check_projection_oracle(std::max<std::size_t>(trials / 2, 20), 512,
                              seeds.derive("oracle")));
  report.checks.push_back(
      check_pythagorean(std::max<std::size_t>(trials / 5, 10), 50, seeds.derive("pyth")));
  report.checks.push_back(check_projection_idempotent(
      std::max<std::size_t>(trials / 10, 10), seeds.derive("idem")));
  report.checks.push_back(
      check_window_exact(std::max<std::size_t>(trials / 5, 20), seeds.derive("winexact")));
  report.checks.push_back(check_window_quantum(trials, 0.1, seeds.derive("winq")));
  report.checks.push_back(check_approx_definition(
      std::max<std::size_t>(trials / 10, 10), seeds.derive("def")));
  return report;
}

inline SuiteReport verify_estimators(std::size_t trials, std::uint64_t seed) {
  SeedStream seeds(seed);
  SuiteReport report;
  report.suite = "estimators";
  report.checks.push_back(check_amplitude_on_grid(seeds.derive("ongrid")));
  report.checks.push_back(
      check_amplitude_off_grid(std::max<std::size_t>(trials * 4, 2000), 0.1,
                               seeds.derive("offgrid")));
  report.checks.push_back(check_amplitude_single_run(
      std::max<std::size_t>(trials * 20, 10000), seeds.derive("single")));
  report.checks.push_back(check_mean_exact(seeds.derive("meanexact")));
  report.checks.push_back(check_mean_quantum(trials, seeds.derive("meanq")));
  report.checks.push_back(check_mean_query_scaling(seeds.derive("meanscale")));
  report.checks.push_back(check_sampler_fidelity(100000, seeds.derive("sampler")));
  report.checks.push_back(check_sampler_cost_model(seeds.derive("cost")));
  report.checks.push_back(check_statevector(seeds.derive("statevec")));
  return report;
}

inline SuiteReport verify_bounds(std::size_t trials, std::uint64_t seed) {
  SeedStream seeds(seed);
  SuiteReport report;
  report.suite = "bounds";
  report.checks.push_back(
      check_implicit_equivalence(300, 0.15, 0.1, 150, seeds.derive("implicit")));
  report.checks.push_back(check_potential_bounds(std::max<std::size_t>(trials / 50, 6), 4,
                                                 seeds.derive("potential")));
  report.checks.push_back(check_projection_re_window(
      std::max<std::size_t>(trials / 25, 20), seeds.derive("rewindow")));
  report.checks.push_back(
      check_regret(std::max<std::size_t>(trials / 10, 50), seeds.derive("regret")));
  report.checks.push_back(
      check_run_invariants(std::max<std::size_t>(trials / 50, 8), seeds.derive("invariants")));
  report.checks.push_back(check_kale_smoothness(seeds.derive("kale")));
  return report;
}

inline std::vector<SuiteReport> verify_all(std::size_t trials, std::uint64_t seed) {
  SeedStream seeds(seed);
  return {verify_identities(trials, seeds.derive("identities")),
          verify_projections(trials, seeds.derive("projections")),
          verify_estimators(trials, seeds.derive("estimators")),
          verify_bounds(trials, seeds.derive("bounds"))};
}

}  // namespace boostlab
