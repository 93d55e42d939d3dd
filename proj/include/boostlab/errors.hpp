#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace boostlab {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Normalizing or projecting a measure whose total weight is zero.
class ZeroWeight : public Error {
 public:
  using Error::Error;
};

// Divergence requested between measures whose supports are incompatible.
class SupportViolation : public Error {
 public:
  using Error::Error;
};

// No finite scaling constant can reach the requested density.
class Infeasible : public Error {
 public:
  using Error::Error;
};

// The mean estimator produced inconsistent answers; carries the search step
// at which the inconsistency surfaced.
class EstimatorFailure : public Error {
 public:
  EstimatorFailure(const std::string& what, std::size_t step)
      : Error(what + " (step " + std::to_string(step) + ")"), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_ = 0;
};

// A weight lower bound assumed by a sampler or estimator does not hold.
class FloorViolation : public Error {
 public:
  using Error::Error;
};

// A proven inequality failed beyond tolerance; carries the iteration index.
class BoundViolation : public Error {
 public:
  BoundViolation(const std::string& what, std::size_t iteration)
      : Error(what + " (iteration " + std::to_string(iteration) + ")"),
        iteration_(iteration) {}
  std::size_t iteration() const { return iteration_; }

 private:
  std::size_t iteration_ = 0;
};

// Input exceeds a hard cap of the dense simulation paths.
class SizeLimit : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class WeakLearnerContractViolation : public Error {
 public:
  WeakLearnerContractViolation(const std::string& what, std::size_t iteration)
      : Error(what + " (iteration " + std::to_string(iteration) + ")"),
        iteration_(iteration) {}
  std::size_t iteration() const { return iteration_; }

 private:
  std::size_t iteration_ = 0;
};

}  // namespace boostlab
