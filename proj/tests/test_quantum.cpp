#include <catch2/catch.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "boostlab/quantum.hpp"
#include "boostlab/rng.hpp"

using namespace boostlab;

TEST_CASE("amplitude estimation recovers on-grid amplitudes exactly") {
  Rng rng(101);
  QueryLedger ledger;
  for (int rep = 0; rep < 25; ++rep) {
    CHECK(amplitude_estimate(0.0, 16, 0.1, rng, &ledger) == 0.0);
    CHECK(amplitude_estimate(1.0, 16, 0.1, rng, &ledger) == 1.0);
  }
  // eigenphase pi/8 sits on grid point 2 of a 16-point readout (accuracy 8)
  const double s = std::sin(std::numbers::pi / 8.0);
  for (int rep = 0; rep < 25; ++rep)
    CHECK(amplitude_estimate(s * s, 8, 0.1, rng, &ledger) == Approx(s).margin(1e-15));
}

TEST_CASE("amplitude estimation charges repetitions times grid") {
  Rng rng(5);
  QueryLedger ledger;
  (void)amplitude_estimate(0.3, 16, 0.1, rng, &ledger);
  // ceil(18 ln 10) = 42 repetitions, readout grid 2*16
  CHECK(ledger.grover_applications == 42u * 32u);
}

TEST_CASE("amplitude estimation hits the 1/A band with high frequency") {
  Rng rng(77);
  const double a = 0.3;
  const std::uint64_t accuracy = 16;
  std::size_t hits = 0;
  const std::size_t trials = 500;
  for (std::size_t k = 0; k < trials; ++k) {
    const double lambda = amplitude_estimate(a, accuracy, 0.1, rng, nullptr);
    if (std::abs(lambda - std::sqrt(a)) <= 1.0 / static_cast<double>(accuracy)) ++hits;
  }
  CHECK(static_cast<double>(hits) / static_cast<double>(trials) >= 0.9);
}

TEST_CASE("amplitude estimation validates its arguments") {
  Rng rng(1);
  CHECK_THROWS_AS(amplitude_estimate(1.5, 16, 0.1, rng, nullptr), ConfigError);
  CHECK_THROWS_AS(amplitude_estimate(0.5, 12, 0.1, rng, nullptr), ConfigError);
  CHECK_THROWS_AS(amplitude_estimate(0.5, 16, 1.5, rng, nullptr), ConfigError);
}

TEST_CASE("exact-pass mean equals the compensated mean and counts queries") {
  Rng rng(3);
  std::vector<double> xs(257);
  for (auto& v : xs) v = rng.next_double();
  MeanEstimator est(EstimatorMode::ExactPass, 0.1, 0.1, 1e-9, 4);
  const double got = est.estimate([&](std::size_t i) { return xs[i]; }, xs.size());
  KahanSum acc;
  for (const double v : xs) acc.add(v);
  CHECK(got == acc.value() / static_cast<double>(xs.size()));
  CHECK(est.ledger().oracle_queries == xs.size());
}

TEST_CASE("exact-pass mode records floor violations") {
  MeanEstimator est(EstimatorMode::ExactPass, 0.1, 0.1, 0.5, 4);
  (void)est.estimate([](std::size_t) { return 0.1; }, 64);
  CHECK(est.floor_violations() == 1);
  (void)est.estimate([](std::size_t) { return 0.9; }, 64);
  CHECK(est.floor_violations() == 1);
}

TEST_CASE("monte-carlo mean sizes its sample from the floor and precision") {
  MeanEstimator est(EstimatorMode::MonteCarlo, 0.2, 0.1, 0.25, 11);
  const double got = est.estimate([](std::size_t) { return 0.5; }, 1024);
  CHECK(got == Approx(0.5).margin(1e-12));  // constant values have zero variance
  const auto expected_draws = static_cast<std::uint64_t>(
      std::ceil(3.0 * std::log(2.0 / 0.1) / (0.25 * 0.2 * 0.2)));
  CHECK(est.ledger().oracle_queries == expected_draws);
}

TEST_CASE("constant inputs stay within the multiplicative band in every mode") {
  for (const auto mode : {EstimatorMode::ExactPass, EstimatorMode::MonteCarlo,
                          EstimatorMode::SimulatedQuantum}) {
    MeanEstimator est(mode, 0.25, 0.1, 0.25, 21);
    for (int rep = 0; rep < 10; ++rep) {
      const double got = est.estimate([](std::size_t) { return 0.5; }, 512);
      CHECK(got >= 0.5 * (1.0 - 0.25));
      CHECK(got <= 0.5 * (1.0 + 0.25));
    }
  }
}

TEST_CASE("simulated-quantum mean keeps its multiplicative contract") {
  Rng rng(41);
  std::vector<double> xs(1024);
  for (auto& v : xs) v = rng.next_double(0.0, 0.9);
  KahanSum acc;
  for (const double v : xs) acc.add(v);
  const double scale = 0.3 / (acc.value() / 1024.0);
  for (auto& v : xs) v = std::min(1.0, v * scale);
  KahanSum acc2;
  for (const double v : xs) acc2.add(v);
  const double mu = acc2.value() / 1024.0;

  MeanEstimator est(EstimatorMode::SimulatedQuantum, 0.25, 0.1, 0.25, 9);
  std::size_t hits = 0;
  for (int k = 0; k < 60; ++k) {
    const double got = est.estimate([&](std::size_t i) { return xs[i]; }, xs.size());
    if (std::abs(got - mu) <= 0.25 * mu) ++hits;
  }
  CHECK(hits >= 54);
}

TEST_CASE("smooth sampler is exact on the uniform measure") {
  Rng rng(13);
  QueryLedger ledger;
  const std::size_t m = 16;
  std::vector<std::uint64_t> counts(m, 0);
  const std::uint64_t draws = 20000;
  for (std::uint64_t k = 0; k < draws; ++k)
    ++counts[prepare_smooth_sample([](std::size_t) { return 1.0; }, m,
                                   static_cast<double>(m), rng, ledger)];
  CHECK(ledger.samples_drawn == draws);  // acceptance probability 1
  std::vector<double> expected(m, 1.0 / static_cast<double>(m));
  std::size_t dof = 0;
  const double stat = chi_square_stat(counts, expected, draws, &dof);
  CHECK(chi_square_pvalue(stat, dof) > 0.01);
}

TEST_CASE("smooth sampler matches skewed weights") {
  Rng rng(17);
  QueryLedger ledger;
  const std::vector<double> w = {1.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  std::vector<std::uint64_t> counts(4, 0);
  const std::uint64_t draws = 100000;
  // weight floor 1.0 is a valid (loose) bound on |M| = 2
  for (std::uint64_t k = 0; k < draws; ++k)
    ++counts[prepare_smooth_sample([&](std::size_t i) { return w[i]; }, 4, 1.0, rng,
                                   ledger)];
  const double freq0 = static_cast<double>(counts[0]) / static_cast<double>(draws);
  CHECK(std::abs(freq0 - 0.5) <= 0.01);
}

TEST_CASE("smooth sampler cost model") {
  Rng rng(19);
  QueryLedger ledger;
  const std::size_t m = 10;
  // weight floor 0.1*m: modeled rate ceil(1/sqrt(0.1)) = 4 per delivered sample
  (void)prepare_smooth_sample([](std::size_t) { return 0.5; }, m, 0.1 * m, rng, ledger);
  CHECK(ledger.modeled_quantum_cost == 4.0);
  (void)prepare_smooth_sample([](std::size_t) { return 0.5; }, m, 0.1 * m, rng, ledger);
  CHECK(ledger.modeled_quantum_cost == 8.0);
}

TEST_CASE("smooth sampler detects a broken weight floor") {
  Rng rng(23);
  QueryLedger ledger;
  CHECK_THROWS_AS(
      prepare_smooth_sample([](std::size_t) { return 0.0; }, 4, 2.0, rng, ledger),
      FloorViolation);
}

TEST_CASE("statevector crosscheck equals the discretized mean") {
  CHECK(statevector_crosscheck(std::vector<double>(8, 1.0), 6) == Approx(1.0).margin(1e-15));
  CHECK(statevector_crosscheck(std::vector<double>(8, 0.0), 6) == Approx(0.0).margin(1e-15));

  const std::vector<double> xs = {0.25, 0.75, 0.5, 0.5};
  CHECK(statevector_crosscheck(xs, 8) == Approx(0.5).margin(1e-12));

  Rng rng(29);
  std::vector<double> random_xs(256);
  for (auto& v : random_xs) v = rng.next_double();
  const int bits = 7;
  const double got = statevector_crosscheck(random_xs, bits);
  const double scale = static_cast<double>(1 << bits);
  KahanSum rounded, raw;
  for (const double v : random_xs) {
    rounded.add(static_cast<double>(std::llround(v * scale)) / scale);
    raw.add(v);
  }
  CHECK(got == Approx(rounded.value() / 256.0).margin(1e-12));
  CHECK(std::abs(got - raw.value() / 256.0) <= std::pow(2.0, -bits));
}

TEST_CASE("statevector crosscheck enforces its caps") {
  CHECK_THROWS_AS(statevector_crosscheck(std::vector<double>(3, 0.5), 4), SizeLimit);
  CHECK_THROWS_AS(statevector_crosscheck(std::vector<double>(8192, 0.5), 4), SizeLimit);
  CHECK_THROWS_AS(statevector_crosscheck(std::vector<double>(8, 0.5), 11), SizeLimit);
  CHECK_THROWS_AS(statevector_crosscheck(std::vector<double>(8, 1.5), 4), ConfigError);
}
