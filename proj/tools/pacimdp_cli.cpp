#include "pacimdp/benchmarks.hpp"
#include "pacimdp/driver.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace pacimdp;

namespace {

struct ModelChoice {
  std::string file;
  std::string benchmark;

  void attach(CLI::App* app) {
    auto* f = app->add_option("--model", file, "Model JSON file");
    auto* b = app->add_option("--benchmark", benchmark, "Built-in model: bas1zone, bas2zone, uav6d, uav4d");
    f->excludes(b);
  }

  std::shared_ptr<const Model> load() const {
    if (!file.empty()) return std::make_shared<const Model>(loadModel(file));
    if (!benchmark.empty()) return std::make_shared<const Model>(parseModel(benchmarkConfig(benchmark)));
    throw ModelError("either --model or --benchmark is required");
  }
};

void printIteration(const IterationRecord& r) {
  std::cout << "N=" << r.N << " states=" << r.stats.states << " choices=" << r.stats.choices
            << " transitions=" << r.stats.transitions << " V0=" << r.initialValue << '\n';
}

void printReport(const SimulationReport& rep) {
  std::cout << "trials=" << rep.trials << " successes=" << rep.successes
            << " empirical=" << rep.empiricalProbability << " wilson=[" << rep.wilson.lower << ", "
            << rep.wilson.upper << "]";
  if (rep.successesStrict != rep.successes) std::cout << " empirical_strict=" << rep.empiricalProbabilityStrict;
  if (rep.inputViolations) std::cout << " input_violations=" << rep.inputViolations;
  std::cout << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PAC interval MDP abstraction and controller synthesis"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: PACIMDP_THREADS or all cores)");

  // synthesize
  auto* syn = app.add_subcommand("synthesize", "Iterative abstraction until the threshold is met");
  ModelChoice synModel;
  synModel.attach(syn);
  RunConfig cfg;
  double threshold = -1.0;
  std::string outDir = "out";
  std::string cache;
  syn->add_option("--beta", cfg.beta, "Confidence parameter")->capture_default_str();
  syn->add_option("--N0", cfg.N0, "Initial sample size")->capture_default_str();
  syn->add_option("--gamma", cfg.gamma, "Sample size growth factor")->capture_default_str();
  syn->add_option("--max-N", cfg.maxN, "Sample size cap")->capture_default_str();
  syn->add_option("--max-iterations", cfg.maxIterations, "Iteration limit")->capture_default_str();
  syn->add_option("--threshold", threshold, "Required guarantee (default: from the model)");
  syn->add_option("--seed", cfg.abstractionSeed, "Abstraction noise seed")->capture_default_str();
  syn->add_option("--validation-seed", cfg.validationSeed, "Validation noise seed")->capture_default_str();
  syn->add_option("--trials", cfg.validationTrials, "Monte Carlo validation trials")->capture_default_str();
  syn->add_option("--out-dir", outDir, "Output directory")->capture_default_str();
  syn->add_option("--table-cache", cache, "Directory for cached interval tables");
  syn->add_flag("--cumulative", cfg.cumulative, "Grow one sample set instead of drawing fresh samples");
  syn->add_flag("--frequentist", cfg.frequentist, "Point-estimate MDP instead of the iMDP");
  syn->add_flag("--export-model", cfg.exportModel, "Write the final model in interchange format");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Monte Carlo validation of a saved policy");
  ModelChoice simModel;
  simModel.attach(sim);
  std::string policyPath;
  std::uint64_t simSeed = 2;
  long long simTrials = 10000;
  int dump = 0;
  std::string simOut = "out";
  sim->add_option("--policy", policyPath, "policy.csv from synthesize")->required();
  sim->add_option("--seed", simSeed, "Noise seed")->capture_default_str();
  sim->add_option("--trials", simTrials, "Trials")->capture_default_str();
  sim->add_option("--dump", dump, "Trajectories to write")->capture_default_str();
  sim->add_option("--out-dir", simOut, "Output directory")->capture_default_str();

  // table
  auto* tab = app.add_subcommand("table", "Dump the PAC interval table for (N, beta)");
  int tabN = 100;
  double tabBeta = 0.01;
  std::string tabOut;
  tab->add_option("--N", tabN, "Sample size")->capture_default_str();
  tab->add_option("--beta", tabBeta, "Confidence parameter")->capture_default_str();
  tab->add_option("--out", tabOut, "CSV file (default: stdout)");

  // export
  auto* exp = app.add_subcommand("export", "Build one abstraction and write it in interchange format");
  ModelChoice expModel;
  expModel.attach(exp);
  int expN = 25;
  double expBeta = 0.01;
  std::uint64_t expSeed = 1;
  bool expFreq = false;
  std::string expOut = "model.imdp";
  exp->add_option("--N", expN, "Sample size")->capture_default_str();
  exp->add_option("--beta", expBeta, "Confidence parameter")->capture_default_str();
  exp->add_option("--seed", expSeed, "Abstraction noise seed")->capture_default_str();
  exp->add_flag("--frequentist", expFreq, "Point-estimate MDP");
  exp->add_option("--out", expOut, "Output file")->capture_default_str();

  // benchmarks
  auto* ben = app.add_subcommand("benchmarks", "Write the built-in model files");
  std::string benOut = "models";
  ben->add_option("--out-dir", benOut, "Output directory")->capture_default_str();

  // sweep
  auto* swp = app.add_subcommand("sweep", "Repeated synthesis and validation at fixed sample sizes");
  ModelChoice swpModel;
  swpModel.attach(swp);
  std::vector<int> swpN{25, 100, 400, 1600};
  int reps = 10;
  long long swpTrials = 10000;
  double swpBeta = 0.01;
  std::uint64_t swpSeed = 1, swpValSeed = 2;
  bool swpFreq = false;
  std::string swpOut = "out";
  swp->add_option("--N", swpN, "Sample sizes")->capture_default_str();
  swp->add_option("--repetitions", reps, "Repetitions per sample size")->capture_default_str();
  swp->add_option("--trials", swpTrials, "Validation trials")->capture_default_str();
  swp->add_option("--beta", swpBeta, "Confidence parameter")->capture_default_str();
  swp->add_option("--seed", swpSeed, "Abstraction noise seed")->capture_default_str();
  swp->add_option("--validation-seed", swpValSeed, "Validation noise seed")->capture_default_str();
  swp->add_flag("--frequentist", swpFreq, "Also run the point-estimate MDP");
  swp->add_option("--out-dir", swpOut, "Output directory")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*syn) {
      cfg.threads = threads;
      cfg.outDir = outDir;
      cfg.tableCache = cache;
      if (threshold >= 0.0) cfg.threshold = threshold;
      const auto art = runSynthesis(synModel.load(), cfg);
      std::cout << "abstraction: " << art.abstraction.actions.actionCount() << " actions, "
                << art.abstraction.actions.choiceCount() << " enabled pairs, " << art.abstraction.seconds
                << " s\n";
      for (const auto& r : art.iterations) printIteration(r);
      std::cout << (art.controllerFound ? "controller found" : "threshold not reached") << " (threshold "
                << art.threshold << ")\n";
      if (art.validation) printReport(*art.validation);
      return art.exitCode();
    }
    if (*sim) {
      const auto abs = buildAbstraction(simModel.load(), threads);
      const auto& part = abs.model->partition;
      auto policy = std::make_shared<RobustPolicy>(importPolicyCsv(policyPath, part.regionCount() + 1, abs.labels));
      if (policy->horizon != abs.model->spec.horizon) throw ModelError("policy horizon does not match the model");
      const auto controller = makeController(abs, policy);
      const auto rep = validateController(abs, controller, simSeed, simTrials, threads, 0, dump);
      std::filesystem::create_directories(simOut);
      std::ofstream out(std::filesystem::path(simOut) / "validation.csv");
      out << "trials,successes,successes_strict,empirical,wilson_lower,wilson_upper\n"
          << rep.trials << ',' << rep.successes << ',' << rep.successesStrict << ',' << rep.empiricalProbability
          << ',' << rep.wilson.lower << ',' << rep.wilson.upper << '\n';
      if (dump > 0) exportTrajectoriesCsv(rep, std::filesystem::path(simOut) / "trajectories.csv");
      printReport(rep);
      return 0;
    }
    if (*tab) {
      const IntervalTable table(tabN, tabBeta, threads);
      std::ofstream file;
      if (!tabOut.empty()) {
        file.open(tabOut);
        if (!file) throw std::runtime_error("cannot write " + tabOut);
      }
      std::ostream& out = tabOut.empty() ? std::cout : file;
      out.precision(15);
      out << "N_out,lower,upper\n";
      for (int k = 0; k <= tabN; ++k) out << k << ',' << table[k].lower << ',' << table[k].upper << '\n';
      return 0;
    }
    if (*exp) {
      const auto abs = buildAbstraction(expModel.load(), threads);
      const auto samples = drawAbstractionSamples(abs.model->noise.withSeed(expSeed), expN);
      std::optional<IntervalTable> table;
      if (!expFreq) table.emplace(expN, expBeta, threads);
      const auto res = runIteration(abs, samples, table ? &*table : nullptr, expBeta, threads);
      exportInterchange(res.mdp, expOut);
      printIteration(res.record);
      return 0;
    }
    if (*ben) {
      std::filesystem::create_directories(benOut);
      for (const auto& [name, doc] : benchmarkConfigs()) {
        std::ofstream out(std::filesystem::path(benOut) / (name + ".json"));
        out << doc.dump(2) << '\n';
      }
      return 0;
    }
    if (*swp) {
      const auto abs = buildAbstraction(swpModel.load(), threads);
      const auto rows = soundnessSweep(abs, swpN, reps, swpTrials, swpBeta, swpSeed, swpValSeed, swpFreq, threads);
      std::filesystem::create_directories(swpOut);
      exportSweepCsv(rows, std::filesystem::path(swpOut) / "sweep_runs.csv",
                     std::filesystem::path(swpOut) / "sweep_summary.csv");
      for (const auto& r : rows) {
        std::cout << (r.frequentist ? "mdp " : "imdp") << " N=" << r.N << " rep=" << r.repetition
                  << " guarantee=" << r.guarantee << " empirical=" << r.empirical
                  << (r.violated() ? " VIOLATED" : "") << '\n';
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
