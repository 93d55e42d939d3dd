#include <catch2/catch.hpp>

#include <cmath>
#include <sstream>

#include "boostlab/measure.hpp"
#include "boostlab/rng.hpp"

using namespace boostlab;

namespace {

Measure random_measure(std::size_t m, Rng& rng, double lo, double hi) {
  std::vector<double> w(m);
  for (auto& v : w) v = rng.next_double(lo, hi);
  return Measure(std::move(w));
}

}  // namespace

TEST_CASE("density of simple measures") {
  CHECK(density(Measure::uniform(4, 1.0)) == 1.0);
  CHECK(density(Measure::uniform(5, 0.0)) == 0.0);
  CHECK(density(Measure({0.9, 0.1, 0.1, 0.1})) == Approx(0.3).margin(1e-15));
}

TEST_CASE("measure validates its entry range") {
  CHECK_THROWS_AS(Measure({0.5, -0.1}), ConfigError);
  CHECK_THROWS_AS(Measure({1.5}), ConfigError);
  CHECK_THROWS_AS(Measure(std::vector<double>{}), ConfigError);
}

TEST_CASE("normalize yields the induced distribution") {
  const auto d = normalize(Measure::uniform(4, 0.5), 1.0);
  for (std::size_t i = 0; i < 4; ++i) CHECK(d[i] == Approx(0.25));

  // tight smoothness: max entry equals 1/(eps*m) exactly
  const Measure m({1.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
  REQUIRE(m.density() == Approx(0.5));
  const auto tight = normalize(m, 0.5);
  CHECK(tight[0] == Approx(0.5).margin(1e-15));
  CHECK(tight[1] == Approx(1.0 / 6.0).margin(1e-15));

  CHECK_THROWS_AS(normalize(Measure::uniform(4, 0.0), 0.5), ZeroWeight);
}

TEST_CASE("smooth distribution rejects cap violations") {
  // point mass is not 0.5-smooth on m=4
  CHECK_THROWS_AS(SmoothDistribution({1.0, 0.0, 0.0, 0.0}, 0.5), ConfigError);
  CHECK_NOTHROW(SmoothDistribution({1.0, 0.0, 0.0, 0.0}, 0.25));
  CHECK_THROWS_AS(SmoothDistribution({0.6, 0.3}, 0.5), ConfigError);  // sum != 1
}

TEST_CASE("kl divergence between measures") {
  const Measure m({0.3, 0.7, 0.25});
  CHECK(kl_measures(m, m) == Approx(0.0).margin(1e-15));

  // 0.5*ln(0.5) + (1.5 - 1.0)
  const double expected = 0.5 * std::log(0.5) + 0.5;
  CHECK(kl_measures(Measure({0.5, 0.5}), Measure({0.5, 1.0})) ==
        Approx(expected).margin(1e-12));
  CHECK(expected == Approx(0.153426).margin(1e-6));

  CHECK_THROWS_AS(kl_measures(Measure({0.5, 0.0}), Measure({0.0, 0.5})), SupportViolation);
}

TEST_CASE("relative entropy between distributions") {
  const auto a = SmoothDistribution({0.5, 0.5}, 0.7);
  const auto b = SmoothDistribution({1.0 / 3.0, 2.0 / 3.0}, 0.7);
  CHECK(relative_entropy(a, a) == Approx(0.0).margin(1e-15));
  const double expected = 0.5 * std::log(1.5) + 0.5 * std::log(0.75);
  CHECK(relative_entropy(a, b) == Approx(expected).margin(1e-12));
  CHECK(expected == Approx(0.058891).margin(1e-6));

  // point mass against uniform over m = 8
  std::vector<double> point(8, 0.0);
  point[1] = 1.0;
  const std::vector<double> uniform(8, 0.125);
  CHECK(relative_entropy(std::span<const double>(point),
                         std::span<const double>(uniform)) ==
        Approx(std::log(8.0)).margin(1e-12));

  CHECK_THROWS_AS(relative_entropy(std::span<const double>(uniform),
                                   std::span<const double>(point)),
                  SupportViolation);
}

TEST_CASE("kl-re identity residual vanishes") {
  const Measure a({0.5, 0.5});
  const Measure b({0.5, 1.0});
  CHECK(kl_re_identity_residual(a, a) == Approx(0.0).margin(1e-15));
  CHECK(kl_re_identity_residual(a, b) == Approx(0.0).margin(1e-12));

  Rng rng(20240811);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 2 + rng.next_below(1023);
    const Measure bb = random_measure(m, rng, 1e-3, 1.0);
    const Measure aa = random_measure(m, rng, 0.0, 1.0);
    worst = std::max(worst, std::abs(kl_re_identity_residual(aa, bb)));
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("identity residual stays tight at m = 10^6") {
  Rng rng(424242);
  const std::size_t m = 1000000;
  std::vector<double> a(m), b(m);
  for (std::size_t i = 0; i < m; ++i) {
    a[i] = rng.next_double(0.0, 1.0);
    b[i] = rng.next_double(1e-3, 1.0);
  }
  const double residual =
      kl_re_identity_residual(Measure(std::move(a)), Measure(std::move(b)));
  CHECK(std::abs(residual) <= 1e-10);
}

TEST_CASE("divergences are nonnegative and 1-homogeneous") {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 2 + rng.next_below(127);
    const Measure a = random_measure(m, rng, 1e-3, 1.0);
    const Measure b = random_measure(m, rng, 1e-3, 1.0);
    const double kl = kl_measures(a, b);
    CHECK(kl >= -1e-12);
    CHECK(relative_entropy(normalize(a, 1e-6), normalize(b, 1e-6)) >= -1e-12);

    const double c = rng.next_double(0.05, 1.0);
    std::vector<double> ca(m), cb(m);
    for (std::size_t i = 0; i < m; ++i) {
      ca[i] = c * a[i];
      cb[i] = c * b[i];
    }
    const double scaled = kl_measures(Measure(std::move(ca)), Measure(std::move(cb)));
    CHECK(scaled == Approx(c * kl).margin(1e-10 * (1.0 + std::abs(kl))));
  }
}

TEST_CASE("csv ingestion with header detection and 0/1 labels") {
  std::istringstream in(
      "f1,f2,label\n"
      "1.0,-1.0,1\n"
      "-1.0,0.5,0\n"
      "0.25,2.0,-1\n");
  const auto data = TrainingSet::from_csv(in);
  REQUIRE(data.size() == 3);
  REQUIRE(data.dimension() == 2);
  CHECK(data.label(0) == 1);
  CHECK(data.label(1) == -1);  // 0 maps to -1
  CHECK(data.label(2) == -1);
  CHECK(data.point(2)[1] == Approx(2.0));
}

TEST_CASE("csv round trip without header") {
  std::istringstream in("1,-1,1\n-1,1,-1\n");
  const auto data = TrainingSet::from_csv(in);
  std::ostringstream out;
  data.to_csv(out);
  std::istringstream again(out.str());
  const auto reread = TrainingSet::from_csv(again);
  REQUIRE(reread.size() == data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    CHECK(reread.label(i) == data.label(i));
    for (std::size_t j = 0; j < data.dimension(); ++j)
      CHECK(reread.point(i)[j] == data.point(i)[j]);
  }
}

TEST_CASE("csv rejects malformed input") {
  std::istringstream bad_label("1.0,5\n");
  CHECK_THROWS_AS(TrainingSet::from_csv(bad_label), ConfigError);
  std::istringstream ragged("1,2,1\n1,1\n");
  CHECK_THROWS_AS(TrainingSet::from_csv(ragged), ConfigError);
  std::istringstream empty("");
  CHECK_THROWS_AS(TrainingSet::from_csv(empty), ConfigError);
}
