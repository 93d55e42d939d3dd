// boostlab: run smooth-boosting experiments, verify numerical invariants,
// and compare algorithm/estimator configurations.
//
// Exit codes: 0 success, 1 configuration error, 2 contract or bound failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "boostlab/boostlab.hpp"

namespace {

using namespace boostlab;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("BOOSTLAB_SEED")) {
    try {
      return std::stoull(env);
    } catch (...) {
      throw ConfigError("BOOSTLAB_SEED is not an integer");
    }
  }
  return 0;
}

struct RunSpec {
  std::string name = "run";
  std::string algo = "quantumboost";
  double gamma = 0.1;
  double epsilon = 0.1;
  double delta = 0.05;
  std::string estimator = "exact";
  std::string learner = "planted";
  std::string task = "junta:k=3,n=20,m=2000";
  std::string data_file;
  std::uint64_t iterations = 0;  // 0: use the schedule
  std::int64_t samples = -1;     // -1: learner default
  std::uint64_t seed = 0;
  bool dense_trace = false;
  std::string contract = "abort";
};

Algorithm parse_algo(const std::string& s) {
  if (s == "kale") return Algorithm::Kale;
  if (s == "quantumboost") return Algorithm::QuantumBoost;
  throw ConfigError("unknown algorithm '" + s + "' (expected kale or quantumboost)");
}

EstimatorMode parse_estimator(const std::string& s) {
  if (s == "exact" || s == "exact-pass") return EstimatorMode::ExactPass;
  if (s == "montecarlo" || s == "monte-carlo") return EstimatorMode::MonteCarlo;
  if (s == "quantum" || s == "simulated-quantum") return EstimatorMode::SimulatedQuantum;
  throw ConfigError("unknown estimator '" + s + "'");
}

ContractPolicy parse_contract(const std::string& s) {
  if (s == "abort") return ContractPolicy::Abort;
  if (s == "warn") return ContractPolicy::Warn;
  throw ConfigError("contract policy must be abort or warn");
}

TrainingSet load_data(const RunSpec& spec) {
  if (!spec.data_file.empty()) {
    std::ifstream in(spec.data_file);
    if (!in) throw ConfigError("cannot open data file '" + spec.data_file + "'");
    return TrainingSet::from_csv(in);
  }
  auto parsed = parse_task_spec(spec.task);
  if (parsed.m == 0) throw ConfigError("task spec must carry m=<count>");
  if (parsed.task.seed == 0) parsed.task.seed = SeedStream(spec.seed).derive("task");
  return generate_task(parsed.task, parsed.m);
}

std::unique_ptr<WeakLearner> make_learner(const RunSpec& spec, std::size_t m) {
  if (spec.learner == "planted")
    return std::make_unique<PlantedWeakLearner>(spec.gamma, m,
                                                SeedStream(spec.seed).derive("learner.tie"));
  if (spec.learner == "stump") return std::make_unique<StumpWeakLearner>();
  throw ConfigError("unknown learner '" + spec.learner + "' (expected planted or stump)");
}

RunResult execute(const RunSpec& spec, const TrainingSet& data) {
  BoostConfig cfg;
  cfg.gamma = spec.gamma;
  cfg.epsilon = spec.epsilon;
  cfg.delta = spec.delta;
  cfg.estimator_mode = parse_estimator(spec.estimator);
  if (spec.iterations > 0) cfg.iterations_override = spec.iterations;
  if (spec.samples >= 0) cfg.samples_override = static_cast<std::size_t>(spec.samples);
  cfg.dense_trace = spec.dense_trace;
  cfg.contract = parse_contract(spec.contract);
  cfg.seed = spec.seed;
  auto learner = make_learner(spec, data.size());
  return run_algorithm(parse_algo(spec.algo), data, *learner, cfg);
}

int finish_run(const RunSpec& spec, RunResult& result, const std::string& out_prefix) {
  RunRecord& rec = result.record;
  if (spec.dense_trace && rec.status == RunStatus::Ok && !rec.rows.empty()) {
    // annotate potential deltas against the uniform starting distribution
    const std::vector<double> uniform(rec.m, 1.0 / static_cast<double>(rec.m));
    annotate_potentials(rec, uniform);
  }
  std::ostringstream lines;
  rec.write_jsonl(lines);
  atomic_write_file(out_prefix + ".jsonl", lines.str());
  atomic_write_file(out_prefix + ".summary.json", rec.summary().dump(2) + "\n");
  std::cout << rec.summary().dump(2) << std::endl;
  return rec.status == RunStatus::Ok ? 0 : 2;
}

RunSpec spec_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  RunSpec spec;
  spec.name = std::filesystem::path(path).stem().string();
  spec.seed = default_seed();
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "name") spec.name = value;
      else if (key == "algo") spec.algo = value;
      else if (key == "gamma") spec.gamma = std::stod(value);
      else if (key == "epsilon") spec.epsilon = std::stod(value);
      else if (key == "delta") spec.delta = std::stod(value);
      else if (key == "estimator") spec.estimator = value;
      else if (key == "learner") spec.learner = value;
      else if (key == "task") spec.task = value;
      else if (key == "data") spec.data_file = value;
      else if (key == "T") spec.iterations = std::stoull(value);
      else if (key == "samples") spec.samples = std::stoll(value);
      else if (key == "seed") spec.seed = std::stoull(value);
      else if (key == "dense_trace") spec.dense_trace = value == "true" || value == "1";
      else if (key == "contract") spec.contract = value;
      else throw ConfigError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    } catch (const ConfigError&) {
      throw;
    } catch (...) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": bad value for '" + key + "'");
    }
  }
  return spec;
}

void require_comparable(const std::vector<RunSpec>& specs) {
  for (std::size_t i = 1; i < specs.size(); ++i) {
    const auto& a = specs.front();
    const auto& b = specs[i];
    if (a.gamma != b.gamma || a.epsilon != b.epsilon || a.task != b.task ||
        a.data_file != b.data_file || a.seed != b.seed || a.learner != b.learner ||
        a.iterations != b.iterations)
      throw ConfigError("compare configs must differ only in algo/estimator ('" + a.name +
                        "' vs '" + b.name + "')");
  }
}

std::string csv_row(const RunSpec& spec, const RunRecord& rec) {
  QueryLedger total = rec.sampler_ledger;
  total.merge(rec.estimator_ledger);
  std::ostringstream row;
  row.precision(12);
  row << spec.name << ',' << to_string(rec.algorithm) << ',' << spec.estimator << ','
      << rec.gamma << ',' << rec.epsilon << ',' << rec.executed_iterations() << ','
      << rec.projections << ',' << rec.final_error << ',' << total.oracle_queries << ','
      << total.grover_applications << ',' << total.samples_drawn << ','
      << total.modeled_quantum_cost;
  return row.str();
}

constexpr const char* kCsvHeader =
    "name,algo,estimator,gamma,epsilon,T,projections,final_error,oracle_queries,"
    "grover_applications,samples_drawn,modeled_quantum_cost";

int cmd_run(const RunSpec& spec, const std::string& out_prefix) {
  const TrainingSet data = load_data(spec);
  RunResult result = execute(spec, data);
  RunSpec annotated = spec;
  return finish_run(annotated, result, out_prefix);
}

int cmd_verify(const std::string& suite, std::size_t trials, std::uint64_t seed) {
  std::vector<SuiteReport> reports;
  if (suite == "identities")
    reports.push_back(verify_identities(trials, seed));
  else if (suite == "projections")
    reports.push_back(verify_projections(trials, seed));
  else if (suite == "estimators")
    reports.push_back(verify_estimators(trials, seed));
  else if (suite == "bounds")
    reports.push_back(verify_bounds(trials, seed));
  else if (suite == "all")
    reports = verify_all(trials, seed);
  else
    throw ConfigError("unknown suite '" + suite +
                      "' (expected identities, projections, estimators, bounds or all)");

  std::size_t passed = 0, failed = 0;
  for (const auto& report : reports) {
    report.print(std::cout);
    for (const auto& check : report.checks) (check.pass ? passed : failed) += 1;
  }
  std::cout << passed << " passed, " << failed << " failed" << std::endl;
  return failed == 0 ? 0 : 2;
}

int cmd_compare(const std::vector<std::string>& config_files, const RunSpec& base,
                const std::string& sweep, const std::vector<double>& values,
                const std::string& out_file) {
  std::vector<RunSpec> specs;
  if (!sweep.empty()) {
    if (values.size() < 2) throw ConfigError("sweep needs at least two --values");
    for (const double v : values) {
      RunSpec s = base;
      std::ostringstream name;
      name << sweep << '=' << v;
      s.name = name.str();
      if (sweep == "epsilon")
        s.epsilon = v;
      else if (sweep == "gamma")
        s.gamma = v;
      else
        throw ConfigError("sweep must be epsilon or gamma");
      specs.push_back(std::move(s));
    }
  } else {
    if (config_files.size() < 2) throw ConfigError("compare needs at least two --config files");
    for (const auto& path : config_files) specs.push_back(spec_from_file(path));
    require_comparable(specs);
  }

  std::ostringstream csv;
  csv << kCsvHeader << '\n';
  std::vector<double> sweep_x, sweep_cost_per_sample;
  for (const auto& spec : specs) {
    const TrainingSet data = load_data(spec);
    const RunResult result = execute(spec, data);
    csv << csv_row(spec, result.record) << '\n';
    std::cout << csv_row(spec, result.record) << std::endl;
    if (!sweep.empty()) {
      const auto& rec = result.record;
      if (rec.sampler_ledger.modeled_quantum_cost > 0) {
        // normalizing by the iteration count isolates the preparation rate
        // from the schedule length, whose log factor the trend suppresses
        const double per_iteration = rec.sampler_ledger.modeled_quantum_cost /
                                     static_cast<double>(rec.executed_iterations());
        sweep_x.push_back(sweep == "epsilon" ? spec.epsilon : spec.gamma);
        sweep_cost_per_sample.push_back(per_iteration);
      }
    }
  }
  if (!sweep.empty() && sweep_x.size() >= 2) {
    const double slope = fit_loglog_slope(sweep_x, sweep_cost_per_sample);
    csv << "# fitted_modeled_cost_exponent," << slope << '\n';
    std::cout << "fitted modeled-cost exponent in " << sweep << ": " << slope << std::endl;
  }
  atomic_write_file(out_file, csv.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"smooth boosting laboratory"};
  app.require_subcommand(1);

  RunSpec spec;
  std::string out_prefix = "run";
  std::string config_file;

  auto* run = app.add_subcommand("run", "execute one boosting run");
  run->add_option("--config", config_file, "key=value config file (flags win)");
  run->add_option("--algo", spec.algo, "kale | quantumboost");
  run->add_option("--gamma", spec.gamma, "weak-learner advantage");
  run->add_option("--epsilon", spec.epsilon, "target empirical error");
  run->add_option("--delta", spec.delta, "total projection failure budget");
  run->add_option("--estimator", spec.estimator, "exact | montecarlo | quantum");
  run->add_option("--learner", spec.learner, "planted | stump");
  run->add_option("--task", spec.task, "task spec, e.g. junta:k=3,n=20,m=2000");
  run->add_option("--data", spec.data_file, "CSV training set (overrides --task)");
  run->add_option("--T", spec.iterations, "iteration override (0 = schedule)");
  run->add_option("--samples", spec.samples, "examples drawn per iteration (-1 = learner default)");
  run->add_option("--seed", spec.seed, "master seed (default env BOOSTLAB_SEED or 0)");
  run->add_flag("--dense-trace", spec.dense_trace, "store dense projection traces");
  run->add_option("--contract", spec.contract, "abort | warn on weak-learner violations");
  run->add_option("--out", out_prefix, "output prefix for .jsonl and .summary.json");

  std::string suite = "all";
  std::size_t trials = 500;
  std::uint64_t verify_seed = 0;
  bool verify_seed_set = false;
  auto* verify = app.add_subcommand("verify", "run invariant suites");
  verify->add_option("suite", suite, "identities | projections | estimators | bounds | all");
  verify->add_option("--trials", trials, "trial count for randomized checks");
  verify->add_option("--seed", verify_seed, "suite seed")->each(
      [&](const std::string&) { verify_seed_set = true; });

  std::vector<std::string> compare_configs;
  std::string sweep;
  std::vector<double> sweep_values;
  std::string compare_out = "compare.csv";
  auto* compare = app.add_subcommand("compare", "run and tabulate several configs");
  compare->add_option("--config", compare_configs, "run config files (repeatable)");
  compare->add_option("--sweep", sweep, "sweep parameter: epsilon | gamma");
  compare->add_option("--values", sweep_values, "sweep values")->delimiter(',');
  compare->add_option("--algo", spec.algo, "base algo for sweeps");
  compare->add_option("--gamma", spec.gamma, "base gamma for sweeps");
  compare->add_option("--epsilon", spec.epsilon, "base epsilon for sweeps");
  compare->add_option("--estimator", spec.estimator, "base estimator for sweeps");
  compare->add_option("--learner", spec.learner, "base learner for sweeps");
  compare->add_option("--task", spec.task, "base task for sweeps");
  compare->add_option("--T", spec.iterations, "base iteration override");
  compare->add_option("--samples", spec.samples, "base samples per iteration");
  compare->add_option("--seed", spec.seed, "base seed");
  compare->add_option("--out", compare_out, "output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "config error: " << e.what() << std::endl;
    return 1;
  }

  try {
    if (run->parsed()) {
      RunSpec merged;
      if (!config_file.empty())
        merged = spec_from_file(config_file);
      else
        merged.seed = default_seed();
      // command-line flags win over config-file values
      if (run->count("--algo")) merged.algo = spec.algo;
      if (run->count("--gamma")) merged.gamma = spec.gamma;
      if (run->count("--epsilon")) merged.epsilon = spec.epsilon;
      if (run->count("--delta")) merged.delta = spec.delta;
      if (run->count("--estimator")) merged.estimator = spec.estimator;
      if (run->count("--learner")) merged.learner = spec.learner;
      if (run->count("--task")) merged.task = spec.task;
      if (run->count("--data")) merged.data_file = spec.data_file;
      if (run->count("--T")) merged.iterations = spec.iterations;
      if (run->count("--samples")) merged.samples = spec.samples;
      if (run->count("--seed")) merged.seed = spec.seed;
      if (run->count("--dense-trace")) merged.dense_trace = spec.dense_trace;
      if (run->count("--contract")) merged.contract = spec.contract;
      if (config_file.empty() && (!run->count("--gamma") || !run->count("--epsilon")))
        throw ConfigError("--gamma and --epsilon are required (flags or config file)");
      return cmd_run(merged, out_prefix);
    }
    if (verify->parsed()) {
      if (!verify_seed_set) verify_seed = default_seed();
      return cmd_verify(suite, trials, verify_seed);
    }
    if (compare->parsed()) return cmd_compare(compare_configs, spec, sweep, sweep_values,
                                              compare_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  }
  return 1;
}
