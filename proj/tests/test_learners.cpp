#include <catch2/catch.hpp>

#include <numeric>

#include "boostlab/learners.hpp"
#include "boostlab/tasks.hpp"

using namespace boostlab;

namespace {

TrainingSet tiny_set(std::size_t m, std::uint64_t seed) {
  SyntheticTask task;
  task.kind = TaskKind::JuntaMajority;
  task.n = 6;
  task.k = 3;
  task.seed = seed;
  return generate_task(task, m);
}

}  // namespace

TEST_CASE("planted learner agrees on a prefix of exact weight") {
  const std::size_t m = 10;
  const auto data = tiny_set(m, 1);
  std::vector<std::size_t> identity(m);
  std::iota(identity.begin(), identity.end(), std::size_t{0});
  PlantedWeakLearner learner(0.1, identity);

  const std::vector<double> uniform(m, 0.1);
  Rng rng(2);
  const auto h =
      learner.learn(LearnContext{data, uniform, {}, rng, 1});
  std::size_t agreements = 0;
  for (std::size_t i = 0; i < m; ++i)
    if (h.train_predictions[i] == data.label(i)) ++agreements;
  CHECK(agreements == 6);  // cumulative weight 0.6 = 1/2 + 0.1
  for (std::size_t i = 0; i < 6; ++i) CHECK(h.train_predictions[i] == data.label(i));
  for (std::size_t i = 6; i < m; ++i) CHECK(h.train_predictions[i] == -data.label(i));
}

TEST_CASE("planted learner stops after one heavy point") {
  const std::size_t m = 5;
  const auto data = tiny_set(m, 3);
  std::vector<std::size_t> order = {2, 0, 1, 3, 4};  // heavy point first
  PlantedWeakLearner learner(0.01, order);
  std::vector<double> dist = {0.1, 0.1, 0.6, 0.1, 0.1};
  Rng rng(4);
  const auto h = learner.learn(LearnContext{data, dist, {}, rng, 1});
  CHECK(h.train_predictions[2] == data.label(2));
  for (const std::size_t i : {0u, 1u, 3u, 4u})
    CHECK(h.train_predictions[i] == -data.label(i));
}

TEST_CASE("planted learner requires the dense distribution") {
  const auto data = tiny_set(4, 5);
  PlantedWeakLearner learner(0.1, 4, 6);
  Rng rng(7);
  CHECK_THROWS_AS(learner.learn(LearnContext{data, {}, {}, rng, 1}), ConfigError);
}

TEST_CASE("stump learner realizes a literal target exactly") {
  // label equals coordinate 2
  std::vector<double> features;
  std::vector<int> labels;
  Rng rng(8);
  const std::size_t m = 64;
  for (std::size_t i = 0; i < m; ++i) {
    for (int j = 0; j < 4; ++j) features.push_back(static_cast<double>(rng.next_sign()));
    labels.push_back(features[i * 4 + 2] > 0 ? 1 : -1);
  }
  const TrainingSet data(std::move(features), std::move(labels), 4);

  std::vector<std::size_t> samples(m);
  std::iota(samples.begin(), samples.end(), std::size_t{0});
  StumpWeakLearner learner;
  Rng lrng(9);
  auto h = learner.learn(LearnContext{data, {}, samples, lrng, 1});
  memoize_train_predictions(h, data);
  for (std::size_t i = 0; i < m; ++i) CHECK(h.train_predictions[i] == data.label(i));
  CHECK(h.id.find("coord=2") != std::string::npos);
}

TEST_CASE("stump learner with a single sample agrees with it") {
  const auto data = tiny_set(8, 10);
  const std::vector<std::size_t> samples = {3};
  StumpWeakLearner learner(1);
  Rng rng(11);
  auto h = learner.learn(LearnContext{data, {}, samples, rng, 1});
  memoize_train_predictions(h, data);
  CHECK(h.train_predictions[3] == data.label(3));
}

TEST_CASE("stump hypotheses are self-contained and re-evaluable") {
  const auto data = tiny_set(32, 12);
  std::vector<std::size_t> samples(32);
  std::iota(samples.begin(), samples.end(), std::size_t{0});
  StumpWeakLearner learner;
  Rng rng(13);
  auto h = learner.learn(LearnContext{data, {}, samples, rng, 1});
  REQUIRE(h.point_evaluable());
  memoize_train_predictions(h, data);
  for (std::size_t i = 0; i < data.size(); ++i)
    CHECK(h.predict(data.point(i)) == h.train_predictions[i]);
}

TEST_CASE("task generation is deterministic in the seed") {
  SyntheticTask task;
  task.kind = TaskKind::JuntaMajority;
  task.n = 12;
  task.k = 5;
  task.seed = 99;
  const auto a = generate_task(task, 100);
  const auto b = generate_task(task, 100);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.label(i) == b.label(i));
    for (std::size_t j = 0; j < a.dimension(); ++j)
      CHECK(a.point(i)[j] == b.point(i)[j]);
  }
}

TEST_CASE("literal task labels equal the first coordinate") {
  SyntheticTask task;
  task.kind = TaskKind::Literal;
  task.n = 10;
  task.seed = 17;
  const auto data = generate_task(task, 200);
  for (std::size_t i = 0; i < data.size(); ++i)
    CHECK(data.label(i) == (data.point(i)[0] > 0 ? 1 : -1));
}

TEST_CASE("junta labels recompute as the designated majority") {
  SyntheticTask task;
  task.kind = TaskKind::JuntaMajority;
  task.n = 9;
  task.k = 3;
  task.seed = 18;
  const auto data = generate_task(task, 500);
  for (std::size_t i = 0; i < data.size(); ++i) {
    int votes = 0;
    for (std::size_t j = 0; j < task.k; ++j)
      votes += data.point(i)[j] > 0 ? 1 : -1;
    CHECK(data.label(i) == (votes > 0 ? 1 : -1));
  }
}

TEST_CASE("noisy task flips exactly the configured count") {
  SyntheticTask clean;
  clean.kind = TaskKind::JuntaMajority;
  clean.n = 8;
  clean.k = 3;
  clean.seed = 19;
  SyntheticTask noisy = clean;
  noisy.kind = TaskKind::NoisyLabels;
  noisy.noise_rate = 0.05;
  const std::size_t m = 1000;
  const auto a = generate_task(clean, m);
  const auto b = generate_task(noisy, m);
  std::size_t flipped = 0;
  for (std::size_t i = 0; i < m; ++i)
    if (a.label(i) != b.label(i)) ++flipped;
  CHECK(flipped == 50);
}

TEST_CASE("task spec parsing") {
  const auto parsed = parse_task_spec("junta:k=3,n=20,m=2000");
  CHECK(parsed.task.kind == TaskKind::JuntaMajority);
  CHECK(parsed.task.k == 3);
  CHECK(parsed.task.n == 20);
  CHECK(parsed.m == 2000);

  CHECK_THROWS_AS(parse_task_spec("mystery:k=1"), ConfigError);
  CHECK_THROWS_AS(parse_task_spec("junta:k=30,n=20,m=100"), ConfigError);
  CHECK_THROWS_AS(parse_task_spec("noisy:k=3,n=9,m=10"), ConfigError);  // needs noise=
  CHECK_NOTHROW(parse_task_spec("noisy:k=3,n=9,m=10,noise=0.1"));
}

TEST_CASE("task spec also accepts key-value text") {
  const auto parsed =
      parse_task_spec("kind=noisy-labels\nn=9\nk=3\nm=120\nnoise_rate=0.1\nseed=4");
  CHECK(parsed.task.kind == TaskKind::NoisyLabels);
  CHECK(parsed.task.n == 9);
  CHECK(parsed.task.k == 3);
  CHECK(parsed.m == 120);
  CHECK(parsed.task.noise_rate == Approx(0.1));
  CHECK(parsed.task.seed == 4);

  // equivalent to the compact form, field for field
  const auto compact = parse_task_spec("noisy:n=9,k=3,m=120,noise=0.1,seed=4");
  const auto a = generate_task(parsed.task, parsed.m);
  const auto b = generate_task(compact.task, compact.m);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.label(i) == b.label(i));
}
