#pragma once

#include <cstdint>

#include <json.hpp>

namespace boostlab {

// Separates actual classical work from the modeled quantum query cost.
// Counters only go up; modeled_quantum_cost is a bookkeeping figure, never a
// wall-clock claim.
struct QueryLedger {
  std::uint64_t oracle_queries = 0;
  std::uint64_t grover_applications = 0;
  std::uint64_t samples_drawn = 0;
  double modeled_quantum_cost = 0.0;

  void merge(const QueryLedger& other) {
    oracle_queries += other.oracle_queries;
    grover_applications += other.grover_applications;
    samples_drawn += other.samples_drawn;
    modeled_quantum_cost += other.modeled_quantum_cost;
  }

  nlohmann::json to_json() const {
    return nlohmann::json{{"oracle_queries", oracle_queries},
                          {"grover_applications", grover_applications},
                          {"samples_drawn", samples_drawn},
                          {"modeled_quantum_cost", modeled_quantum_cost}};
  }
};

}  // namespace boostlab
