// Acceptance suite: runs every release criterion at full scale and prints
// one PASS/FAIL line per criterion. Exits nonzero if any criterion fails.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "boostlab/boostlab.hpp"

using namespace boostlab;

namespace {

struct Criterion {
  int id;
  std::string name;
  bool pass;
  std::string detail;
};

std::vector<Criterion> g_results;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  g_results.push_back({id, name, pass, detail});
  std::cout << '[' << std::setw(2) << id << "] " << (pass ? "PASS" : "FAIL") << "  " << name
            << ": " << detail << std::endl;
}

void report(int id, const std::string& name, const CheckResult& check) {
  report(id, name, check.pass, check.detail);
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss << std::setprecision(6) << v;
  return ss.str();
}

struct GridRun {
  double gamma;
  double epsilon;
  std::uint64_t seed;
  RunRecord record;
  double max_final_entry;
};

// Criteria 1, 2 and 10 share the full convergence grid:
// gamma x epsilon x 10 seeds at m = 2000 with the planted learner.
std::vector<GridRun> run_convergence_grid() {
  std::vector<GridRun> runs;
  const std::size_t m = 2000;
  for (const double gamma : {0.05, 0.1, 0.2}) {
    for (const double epsilon : {0.05, 0.1}) {
      for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        SyntheticTask task;
        task.kind = TaskKind::JuntaMajority;
        task.n = 20;
        task.k = 3;
        task.seed = mix64(seed * 1009 + static_cast<std::uint64_t>(gamma * 1e4) +
                          static_cast<std::uint64_t>(epsilon * 1e6));
        const TrainingSet data = generate_task(task, m);
        PlantedWeakLearner learner(gamma, m, mix64(task.seed ^ 0xabcdef));
        BoostConfig cfg;
        cfg.gamma = gamma;
        cfg.epsilon = epsilon;
        cfg.estimator_mode = EstimatorMode::ExactPass;
        cfg.seed = seed;
        auto result = run_quantumboost(data, learner, cfg);
        double max_entry = 0.0;
        for (const double v : result.final_measure) max_entry = std::max(max_entry, v);
        runs.push_back({gamma, epsilon, seed, std::move(result.record), max_entry});
      }
    }
  }
  return runs;
}

void criterion_1_2_10(const std::vector<GridRun>& grid) {
  // 1: empirical error below epsilon in every run at the scheduled T
  bool converged = true;
  double worst_margin = 1.0;
  for (const auto& run : grid) {
    if (run.record.status != RunStatus::Ok || !(run.record.final_error < run.epsilon))
      converged = false;
    worst_margin = std::min(worst_margin, run.epsilon - run.record.final_error);
  }
  report(1, "convergence grid", converged,
         std::to_string(grid.size()) +
             " runs (gamma x epsilon x 10 seeds, m=2000), worst error margin below "
             "epsilon = " +
             fmt(worst_margin));

  // 2: lazy schedule projection counts, including the worked 922/93 case
  bool schedule_ok = true;
  std::string example;
  for (const auto& run : grid) {
    const std::size_t K = nudged_ceil(1.0 / run.gamma);
    const std::size_t expected = ceil_div(run.record.executed_iterations(), K);
    if (run.record.projections != expected) schedule_ok = false;
    if (run.gamma == 0.1 && run.epsilon == 0.1 && example.empty()) {
      example = "T=" + std::to_string(run.record.executed_iterations()) +
                ", R=" + std::to_string(run.record.projections);
      if (run.record.executed_iterations() != 922 || run.record.projections != 93)
        schedule_ok = false;
    }
  }
  report(2, "lazy projection schedule", schedule_ok,
         "R = ceil(T/ceil(1/gamma)) in every run; at gamma=0.1, eps=0.1: " + example);

  // 10: weight floor and entry cap across all grid runs
  bool floor_ok = true;
  double worst_floor_margin = 1e9;
  for (const auto& run : grid) {
    const std::size_t K = nudged_ceil(1.0 / run.gamma);
    const double floor =
        std::pow(1.0 - run.gamma, static_cast<double>(K)) * run.epsilon * 2000.0 -
        1e-9 * 2000.0;
    worst_floor_margin = std::min(worst_floor_margin, run.record.min_weight - floor);
    if (run.record.min_weight < floor) floor_ok = false;
    if (run.max_final_entry > 1.0) floor_ok = false;
  }
  report(10, "weight floor and entry cap", floor_ok,
         "min |M^t| above (1-gamma)^K * eps * m in all runs, margin " +
             fmt(worst_floor_margin) + "; entries <= 1");
}

void criterion_16(std::uint64_t seed) {
  // (a) epsilon sweep of the modeled per-sample preparation cost
  const std::vector<double> eps_values = {0.02, 0.04, 0.08, 0.16, 0.32};
  std::vector<double> xs, ys;
  const std::size_t m = 1000;
  for (const double eps : eps_values) {
    SyntheticTask task;
    task.kind = TaskKind::JuntaMajority;
    task.n = 12;
    task.k = 3;
    task.seed = mix64(seed + static_cast<std::uint64_t>(eps * 1e5));
    const TrainingSet data = generate_task(task, m);
    PlantedWeakLearner learner(0.2, m, mix64(task.seed ^ 0x1357));
    BoostConfig cfg;
    cfg.gamma = 0.2;
    cfg.epsilon = eps;
    cfg.estimator_mode = EstimatorMode::ExactPass;
    cfg.seed = seed + static_cast<std::uint64_t>(eps * 1e4);
    const auto result = run_quantumboost(data, learner, cfg);
    // per-sample modeled cost isolates the floor dependence from the
    // iteration count, whose log factor the runtime statement suppresses
    const double per_sample =
        result.record.sampler_ledger.modeled_quantum_cost /
        (static_cast<double>(result.record.executed_iterations()) * 64.0);
    xs.push_back(eps);
    ys.push_back(per_sample);
  }
  const double exponent = fit_loglog_slope(xs, ys);
  const bool sweep_ok = exponent >= -0.7 && exponent <= -0.3;

  // (b) eager baseline projects about K times more often
  bool ratio_ok = true;
  std::string ratios;
  for (const double gamma : {0.05, 0.1, 0.2}) {
    const std::size_t m2 = 400;
    SyntheticTask task;
    task.kind = TaskKind::JuntaMajority;
    task.n = 10;
    task.k = 3;
    task.seed = mix64(seed ^ static_cast<std::uint64_t>(gamma * 1e5));
    const TrainingSet data = generate_task(task, m2);
    BoostConfig cfg;
    cfg.gamma = gamma;
    cfg.epsilon = 0.1;
    cfg.samples_override = 4;
    cfg.seed = seed;
    PlantedWeakLearner kale_learner(gamma, m2, mix64(task.seed ^ 1));
    const auto kale = run_kale_smoothboost(data, kale_learner, cfg);
    PlantedWeakLearner qb_learner(gamma, m2, mix64(task.seed ^ 1));
    const auto qb = run_quantumboost(data, qb_learner, cfg);
    const double interval = static_cast<double>(nudged_ceil(1.0 / gamma));
    const double ratio = static_cast<double>(kale.record.projections) /
                         static_cast<double>(qb.record.projections);
    if (std::abs(ratio / interval - 1.0) > 0.15) ratio_ok = false;
    ratios += " gamma=" + fmt(gamma) + ": " + fmt(ratio) + " (K=" + fmt(interval) + ")";
  }
  report(16, "cost trends", sweep_ok && ratio_ok,
         "per-sample modeled-cost exponent " + fmt(exponent) +
             " in [-0.7,-0.3]; projection-count ratios" + ratios);
}

}  // namespace

int main(int argc, char** argv) {
  const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 20250808;
  SeedStream seeds(seed);
  std::cout << "acceptance suite (seed " << seed << ")\n";

  // numerical criteria
  report(5, "divergence identity residual",
         check_kl_re_residual(500, 1024, seeds.derive("c5")));
  report(3, "projection constant vs brute-force oracle",
         check_projection_oracle(200, 512, seeds.derive("c3")));
  report(6, "projection Pythagorean inequality",
         check_pythagorean(20, 5, seeds.derive("c6")));
  {
    const auto window_exact = check_window_exact(100, seeds.derive("c4a"));
    const auto window_quantum = check_window_quantum(500, 0.1, seeds.derive("c4b"));
    const auto def_slack = check_approx_definition(100, seeds.derive("c4c"));
    report(4, "approximate projection contract",
           window_exact.pass && window_quantum.pass && def_slack.pass,
           window_exact.detail + "; " + window_quantum.detail + "; " + def_slack.detail);
  }
  {
    const auto quantum = check_mean_quantum(500, seeds.derive("c12a"));
    const auto scaling = check_mean_query_scaling(seeds.derive("c12b"));
    report(12, "mean estimation", quantum.pass && scaling.pass,
           quantum.detail + "; " + scaling.detail);
  }
  {
    const auto on_grid = check_amplitude_on_grid(seeds.derive("c13a"));
    const auto off_grid = check_amplitude_off_grid(10000, 0.1, seeds.derive("c13b"));
    report(13, "amplitude estimation", on_grid.pass && off_grid.pass,
           on_grid.detail + "; " + off_grid.detail);
  }
  report(14, "statevector crosscheck", check_statevector(seeds.derive("c14")));
  {
    const auto fidelity = check_sampler_fidelity(100000, seeds.derive("c15a"));
    const auto cost = check_sampler_cost_model(seeds.derive("c15b"));
    report(15, "sampler fidelity and cost model", fidelity.pass && cost.pass,
           fidelity.detail + "; " + cost.detail);
  }

  // instrumented-run criteria
  {
    const auto deep = check_implicit_equivalence(500, 0.1, 0.1, 922, seeds.derive("c11a"));
    const auto wide = check_implicit_equivalence(2000, 0.1, 0.1, 150, seeds.derive("c11b"));
    report(11, "implicit representation correctness", deep.pass && wide.pass,
           deep.detail + "; " + wide.detail);
  }
  report(7, "projection relative-entropy window",
         check_projection_re_window(20, seeds.derive("c7")));
  report(8, "regret bound", check_regret(50, seeds.derive("c8")));
  report(9, "potential decomposition", check_potential_bounds(10, 5, seeds.derive("c9")));

  // convergence grid (criteria 1, 2, 10) and cost trends (16)
  criterion_1_2_10(run_convergence_grid());
  criterion_16(seeds.derive("c16"));

  std::size_t passed = 0;
  for (const auto& c : g_results) passed += c.pass ? 1 : 0;
  std::cout << "ACCEPTANCE: " << passed << '/' << g_results.size() << " criteria passed"
            << std::endl;
  return passed == g_results.size() ? 0 : 1;
}
