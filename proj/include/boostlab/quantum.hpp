#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "boostlab/errors.hpp"
#include "boostlab/ledger.hpp"
#include "boostlab/numeric.hpp"
#include "boostlab/rng.hpp"

namespace boostlab {

namespace detail {

// Exact phase-readout distribution of a size-M phase register locked onto a
// rotation with angle theta = pi*omega:
//   P(y) = sin^2(M * pi * d) / (M * sin(pi * d))^2,  d = omega - y/M.
// Both eigenphases (+/- omega) fold onto the same estimate because
// sin(pi*y/M) = sin(pi*(M-y)/M); sampling one branch is therefore exact.
inline std::vector<double> phase_readout_cdf(double omega, std::uint64_t grid) {
  const double pi = std::numbers::pi;
  const double m = static_cast<double>(grid);
  std::vector<double> cdf(grid);
  KahanSum acc;
  for (std::uint64_t y = 0; y < grid; ++y) {
    const double d = omega - static_cast<double>(y) / m;
    const double den = m * std::sin(pi * d);
    double p;
    if (den == 0.0) {
      p = 1.0;  // on-grid phase: all mass on this outcome
    } else {
      const double r = std::sin(m * pi * d) / den;
      p = r * r;
    }
    acc.add(p);
    cdf[y] = acc.value();
  }
  const double total = cdf.back();
  for (double& v : cdf) v /= total;
  return cdf;
}

inline std::uint64_t sample_cdf(std::span<const double> cdf, Rng& rng) {
  const double u = rng.next_double();
  std::size_t lo = 0, hi = cdf.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (cdf[mid] <= u)
      lo = mid + 1;
    else
      hi = mid;
  }
  return lo;
}

}  // namespace detail

// Estimates sqrt(a) to within 1/accuracy with probability >= 1-delta, by
// sampling the exact readout distribution of a phase register of size
// 2*accuracy (the padding buys the plain 1/accuracy contract: the nearest
// grid point is always within pi/(4*accuracy) in amplitude) and taking the
// median of ceil(18*ln(1/delta)) independent repetitions.
// Charges repetitions * grid Grover applications to the ledger.
inline double amplitude_estimate(double a, std::uint64_t accuracy, double delta, Rng& rng,
                                 QueryLedger* ledger = nullptr) {
  if (!(a >= 0.0) || a > 1.0) throw ConfigError("amplitude must lie in [0,1]");
  if (accuracy < 2 || !is_pow2(accuracy))
    throw ConfigError("accuracy parameter must be a power of two >= 2");
  if (!(delta > 0.0) || delta >= 1.0) throw ConfigError("delta must lie in (0,1)");

  const double pi = std::numbers::pi;
  const std::uint64_t grid = 2 * accuracy;
  const double omega = std::asin(std::sqrt(a)) / pi;  // in [0, 1/2]
  const auto cdf = detail::phase_readout_cdf(omega, grid);

  const auto repetitions =
      static_cast<std::uint64_t>(std::ceil(18.0 * std::log(1.0 / delta)));
  std::vector<double> estimates;
  estimates.reserve(repetitions);
  for (std::uint64_t r = 0; r < repetitions; ++r) {
    const std::uint64_t y = detail::sample_cdf(cdf, rng);
    estimates.push_back(std::sin(pi * static_cast<double>(y) / static_cast<double>(grid)));
  }
  if (ledger) ledger->grover_applications += repetitions * grid;
  return median_inplace(estimates);
}

enum class EstimatorMode { ExactPass, MonteCarlo, SimulatedQuantum };

inline const char* to_string(EstimatorMode mode) {
  switch (mode) {
    case EstimatorMode::ExactPass: return "exact-pass";
    case EstimatorMode::MonteCarlo: return "monte-carlo";
    case EstimatorMode::SimulatedQuantum: return "simulated-quantum";
  }
  return "?";
}

// Pluggable mean estimator over values x_1..x_N in [0,1]. The caller promises
// the true mean is at least mu_floor; the simulated-quantum mode sizes its
// phase register from that promise (violations are recorded, not rejected,
// except in exact-pass mode where they are detectable).
class MeanEstimator {
 public:
  MeanEstimator(EstimatorMode mode, double zeta, double delta, double mu_floor,
                std::uint64_t seed)
      : mode_(mode), zeta_(zeta), delta_(delta), mu_floor_(mu_floor), rng_(seed) {
    if (!(zeta_ > 0.0) || zeta_ >= 0.5) throw ConfigError("zeta must lie in (0, 0.5)");
    if (!(delta_ > 0.0) || delta_ >= 1.0) throw ConfigError("delta must lie in (0,1)");
    if (!(mu_floor_ > 0.0)) throw ConfigError("mu_floor must be positive");
  }

  EstimatorMode mode() const { return mode_; }
  double zeta() const { return zeta_; }
  double delta() const { return delta_; }
  double mu_floor() const { return mu_floor_; }
  QueryLedger& ledger() { return ledger_; }
  const QueryLedger& ledger() const { return ledger_; }
  std::uint64_t floor_violations() const { return floor_violations_; }
  Rng& rng() { return rng_; }

  template <class ValueFn>
  double estimate(ValueFn&& value, std::size_t n) {
    return estimate(std::forward<ValueFn>(value), n, delta_);
  }

  // Multiplicative-error estimate with a per-call failure budget.
  template <class ValueFn>
  double estimate(ValueFn&& value, std::size_t n, double delta) {
    switch (mode_) {
      case EstimatorMode::ExactPass: {
        const double mu = exact_mean(value, n);
        ledger_.oracle_queries += n;
        if (mu < mu_floor_ - 1e-12) ++floor_violations_;
        return mu;
      }
      case EstimatorMode::MonteCarlo: {
        const auto draws = static_cast<std::uint64_t>(
            std::ceil(3.0 * std::log(2.0 / delta) / (mu_floor_ * zeta_ * zeta_)));
        KahanSum acc;
        for (std::uint64_t k = 0; k < draws; ++k)
          acc.add(value(static_cast<std::size_t>(rng_.next_below(n))));
        ledger_.oracle_queries += draws;
        return acc.value() / static_cast<double>(draws);
      }
      case EstimatorMode::SimulatedQuantum: {
        // The simulator reads the exact mean to parameterize the readout
        // distribution; only the modeled quantum work is charged.
        const double mu = exact_mean(value, n);
        const auto accuracy = static_cast<std::uint64_t>(
            next_pow2(static_cast<std::uint64_t>(
                std::ceil(2.0 / (std::sqrt(mu_floor_) * zeta_)))));
        const double lambda =
            amplitude_estimate(std::min(1.0, mu), std::max<std::uint64_t>(accuracy, 2),
                               delta, rng_, &ledger_);
        return lambda * lambda;
      }
    }
    throw Error("unreachable estimator mode");
  }

 private:
  template <class ValueFn>
  static double exact_mean(ValueFn&& value, std::size_t n) {
    KahanSum acc;
    for (std::size_t i = 0; i < n; ++i) acc.add(value(i));
    return acc.value() / static_cast<double>(n);
  }

  EstimatorMode mode_;
  double zeta_;
  double delta_;
  double mu_floor_;
  Rng rng_;
  QueryLedger ledger_;
  std::uint64_t floor_violations_ = 0;
};

namespace detail {

template <class EntryFn>
std::size_t rejection_sample(EntryFn&& entry, std::size_t m, double weight_floor, Rng& rng,
                             QueryLedger& ledger, bool charge_quantum_rate) {
  if (!(weight_floor > 0.0)) throw ConfigError("weight floor must be positive");
  const double eps_prime = weight_floor / static_cast<double>(m);
  const auto max_attempts = static_cast<std::uint64_t>(
      std::ceil(2.0 * static_cast<double>(m) / eps_prime));
  std::uint64_t attempts = 0;
  for (;;) {
    ++attempts;
    if (attempts > max_attempts)
      throw FloorViolation("rejection sampler exceeded its attempt budget; "
                           "the weight floor no longer holds");
    const auto i = static_cast<std::size_t>(rng.next_below(m));
    const double w = entry(i);
    if (rng.next_double() < w) {
      ledger.samples_drawn += attempts;
      if (charge_quantum_rate)
        ledger.modeled_quantum_cost += std::ceil(1.0 / std::sqrt(eps_prime));
      return i;
    }
  }
}

}  // namespace detail

// Draws index i with probability M(x_i)/|M| by rejection sampling against
// the uniform proposal. Classical attempts are counted in samples_drawn;
// the modeled quantum preparation rate ceil(1/sqrt(eps')) with
// eps' = weight_floor/m is charged once per delivered sample.
template <class EntryFn>
std::size_t prepare_smooth_sample(EntryFn&& entry, std::size_t m, double weight_floor,
                                  Rng& rng, QueryLedger& ledger) {
  return detail::rejection_sample(std::forward<EntryFn>(entry), m, weight_floor, rng, ledger,
                                  /*charge_quantum_rate=*/true);
}

// Same sampler without the modeled quantum charge, for classical baselines.
template <class EntryFn>
std::size_t rejection_sample_classical(EntryFn&& entry, std::size_t m, double weight_floor,
                                       Rng& rng, QueryLedger& ledger) {
  return detail::rejection_sample(std::forward<EntryFn>(entry), m, weight_floor, rng, ledger,
                                  /*charge_quantum_rate=*/false);
}

// Materializes (1/sqrt(N)) sum_i |i>|v_i>(sqrt(xb_i)|1> + sqrt(1-xb_i)|0>)
// with xb_i = x_i rounded to `bits` fractional bits, and returns the squared
// norm of the flag-1 component. This equals the mean of the rounded values;
// computing it from the amplitude array cross-checks the rotation-oracle
// construction against the direct mean.
inline double statevector_crosscheck(std::span<const double> values, int bits) {
  const std::size_t n = values.size();
  if (n == 0 || n > (1u << 12) || !is_pow2(n))
    throw SizeLimit("value count must be a power of two <= 4096");
  if (bits < 1 || bits > 10) throw SizeLimit("value register limited to 10 bits");
  for (const double v : values)
    if (!(v >= 0.0) || v > 1.0) throw ConfigError("values must lie in [0,1]");

  const std::uint64_t levels = (1ull << bits) + 1;  // v in {0,...,2^bits}
  const double scale = static_cast<double>(1ull << bits);
  // layout: amp[(i*levels + v)*2 + flag]
  std::vector<double> amp(n * levels * 2, 0.0);
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto v = static_cast<std::uint64_t>(std::llround(values[i] * scale));
    const double xb = static_cast<double>(v) / scale;
    amp[(i * levels + v) * 2 + 1] = inv_sqrt_n * std::sqrt(xb);
    amp[(i * levels + v) * 2 + 0] = inv_sqrt_n * std::sqrt(1.0 - xb);
  }
  KahanSum flag_one;
  for (std::size_t k = 1; k < amp.size(); k += 2) flag_one.add(amp[k] * amp[k]);
  return flag_one.value();
}

}  // namespace boostlab
