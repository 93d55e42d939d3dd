#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "boostlab/errors.hpp"
#include "boostlab/measure.hpp"
#include "boostlab/rng.hpp"

namespace boostlab {

enum class TaskKind { Literal, JuntaMajority, NoisyLabels };

inline const char* to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::Literal: return "literal";
    case TaskKind::JuntaMajority: return "junta";
    case TaskKind::NoisyLabels: return "noisy";
  }
  return "?";
}

// Synthetic labeling task over the +/-1 hypercube. `noisy` is the junta task
// with exactly floor(noise_rate*m) labels flipped, so smoothness-vs-noise
// experiments are parameterized by an exact count rather than coin flips.
struct SyntheticTask {
  TaskKind kind = TaskKind::JuntaMajority;
  std::size_t n = 10;          // feature dimension
  std::size_t k = 3;           // relevant coordinates (majority tasks)
  double noise_rate = 0.0;     // fraction of flipped labels
  std::uint64_t seed = 0;

  void validate() const {
    if (n == 0) throw ConfigError("task dimension must be positive");
    if (kind != TaskKind::Literal && k > n)
      throw ConfigError("task uses k relevant coordinates but k > n");
    if (noise_rate < 0.0 || noise_rate >= 1.0)
      throw ConfigError("noise rate must lie in [0,1)");
  }
};

inline TrainingSet generate_task(const SyntheticTask& task, std::size_t m) {
  task.validate();
  if (m == 0) throw ConfigError("task needs at least one example");
  SeedStream seeds(task.seed);
  Rng feature_rng = seeds.stream("task.features");

  std::vector<double> features(m * task.n);
  for (double& v : features) v = static_cast<double>(feature_rng.next_sign());

  std::vector<int> labels(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double* x = features.data() + i * task.n;
    if (task.kind == TaskKind::Literal) {
      labels[i] = x[0] > 0 ? 1 : -1;
    } else {
      long long votes = 0;
      for (std::size_t j = 0; j < task.k; ++j) votes += x[j] > 0 ? 1 : -1;
      labels[i] = votes > 0 ? 1 : -1;
    }
  }

  const auto flips = static_cast<std::size_t>(
      std::floor(task.noise_rate * static_cast<double>(m)));
  if (flips > 0) {
    Rng noise_rng = seeds.stream("task.noise");
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    shuffle(order, noise_rng);
    for (std::size_t i = 0; i < flips; ++i) labels[order[i]] = -labels[order[i]];
  }

  return TrainingSet(std::move(features), std::move(labels), task.n);
}

struct ParsedTask {
  SyntheticTask task;
  std::size_t m = 0;
};

namespace detail {

inline TaskKind parse_task_kind(const std::string& kind) {
  if (kind == "literal") return TaskKind::Literal;
  if (kind == "junta" || kind == "k-junta-majority") return TaskKind::JuntaMajority;
  if (kind == "noisy" || kind == "noisy-labels") return TaskKind::NoisyLabels;
  throw ConfigError("unknown task kind '" + kind + "' (expected literal, junta or noisy)");
}

inline void apply_task_option(ParsedTask& out, const std::string& key,
                              const std::string& value) {
  try {
    if (key == "kind")
      out.task.kind = parse_task_kind(value);
    else if (key == "n")
      out.task.n = std::stoul(value);
    else if (key == "k")
      out.task.k = std::stoul(value);
    else if (key == "m")
      out.m = std::stoul(value);
    else if (key == "noise" || key == "noise_rate")
      out.task.noise_rate = std::stod(value);
    else if (key == "seed")
      out.task.seed = std::stoull(value);
    else
      throw ConfigError("unknown task option '" + key + "'");
  } catch (const ConfigError&) {
    throw;
  } catch (...) {
    throw ConfigError("bad value for task option '" + key + "'");
  }
}

}  // namespace detail

// Accepts the compact form "kind:key=value,..." (e.g. "junta:k=3,n=20,m=2000")
// and plain key-value text "kind=junta,k=3,..." with separators ',' or
// newlines. Keys: kind, n, k, m, noise(_rate), seed.
inline ParsedTask parse_task_spec(std::string_view spec) {
  ParsedTask out;
  std::string body(spec);
  const auto colon = spec.find(':');
  const auto eq = spec.find('=');
  if (colon != std::string_view::npos && (eq == std::string_view::npos || colon < eq)) {
    out.task.kind = detail::parse_task_kind(std::string(spec.substr(0, colon)));
    body = std::string(spec.substr(colon + 1));
  } else if (eq == std::string_view::npos) {
    out.task.kind = detail::parse_task_kind(body);
    body.clear();
  }
  std::string normalized = body;
  for (char& c : normalized)
    if (c == '\n' || c == '\r') c = ',';
  const auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  std::stringstream rest{normalized};
  std::string item;
  while (std::getline(rest, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto split = item.find('=');
    if (split == std::string::npos)
      throw ConfigError("task option '" + item + "' is not key=value");
    detail::apply_task_option(out, trim(item.substr(0, split)),
                              trim(item.substr(split + 1)));
  }
  if (out.task.kind == TaskKind::NoisyLabels && out.task.noise_rate == 0.0)
    throw ConfigError("noisy task requires a positive noise= option");
  out.task.validate();
  return out;
}

}  // namespace boostlab
