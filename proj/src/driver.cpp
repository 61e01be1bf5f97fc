#include "pacimdp/driver.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace pacimdp {

namespace {

using Clock = std::chrono::steady_clock;

double secondsSince(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::ofstream openOutput(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(17);
  return out;
}

IntervalTable tableFor(const RunConfig& config, int N) {
  if (config.tableCache.empty()) return IntervalTable(N, config.beta, config.threads);
  return IntervalTable::cached(config.tableCache, N, config.beta, config.threads);
}

void writeIterations(const std::vector<IterationRecord>& records, const std::filesystem::path& path) {
  auto out = openOutput(path);
  out << "iteration,N,states,choices,transitions,interval_s,build_s,verify_s,V0\n";
  for (const auto& r : records) {
    out << r.iteration << ',' << r.N << ',' << r.stats.states << ',' << r.stats.choices << ','
        << r.stats.transitions << ',' << r.intervalSeconds << ',' << r.buildSeconds << ','
        << r.verifySeconds << ',' << r.initialValue << '\n';
  }
}

void writeValidation(const SimulationReport& rep, const std::filesystem::path& path) {
  auto out = openOutput(path);
  out << "trials,successes,successes_strict,empirical,empirical_strict,wilson_lower,wilson_upper,input_violations\n";
  out << rep.trials << ',' << rep.successes << ',' << rep.successesStrict << ','
      << rep.empiricalProbability << ',' << rep.empiricalProbabilityStrict << ','
      << rep.wilson.lower << ',' << rep.wilson.upper << ',' << rep.inputViolations << '\n';
}

}  // namespace

void RunConfig::validate() const {
  if (!(gamma > 1.0)) throw ModelError("gamma must exceed 1");
  if (!(beta > 0.0 && beta < 1.0)) throw ModelError("beta must lie in (0, 1)");
  if (N0 < 1) throw ModelError("N0 must be positive");
  if (maxN < N0) throw ModelError("maxN must be at least N0");
  if (maxIterations < 1) throw ModelError("maxIterations must be positive");
  if (threshold && !(*threshold >= 0.0 && *threshold <= 1.0)) throw ModelError("threshold must lie in [0, 1]");
  if (abstractionSeed == validationSeed) throw ModelError("abstraction and validation seeds must differ");
  if (validationTrials < 0) throw ModelError("validation trials must be nonnegative");
}

std::vector<int> sampleSchedule(const RunConfig& config) {
  std::vector<int> out;
  double N = config.N0;
  for (int z = 0; z < config.maxIterations; ++z) {
    out.push_back(static_cast<int>(std::min<double>(std::llround(N), config.maxN)));
    N *= config.gamma;
  }
  return out;
}

Abstraction buildAbstraction(std::shared_ptr<const Model> model, unsigned threads) {
  const auto t0 = Clock::now();
  Abstraction abs;
  abs.labels = labelRegions(model->partition, model->spec);
  abs.actions = enabledActions(model->system, model->partition, centerTargets(model->partition), threads);
  abs.initialRegion = model->partition.regionIndex(model->spec.initialState);
  abs.model = std::move(model);
  abs.seconds = secondsSince(t0);
  return abs;
}

IterationResult runIteration(const Abstraction& abs, std::span<const Vector> samples,
                             const IntervalTable* table, double beta, unsigned threads) {
  const Model& m = *abs.model;
  IterationResult res;
  res.record.N = static_cast<int>(samples.size());

  auto t0 = Clock::now();
  const SampleCounts counts = countSamples(m.partition, abs.actions.targets, samples, threads);
  res.record.intervalSeconds = secondsSince(t0);

  t0 = Clock::now();
  if (table) {
    if (table->sampleCount() != res.record.N) throw ModelError("interval table does not match the sample count");
    res.mdp = buildImdp(m.partition, abs.actions, counts, *table, m.spec);
  } else {
    res.mdp = buildPointMdp(m.partition, abs.actions, counts, m.spec);
    res.mdp.beta = beta;
  }
  res.record.buildSeconds = secondsSince(t0);
  res.record.stats = modelStats(res.mdp);

  t0 = Clock::now();
  res.policy = std::make_shared<RobustPolicy>(robustValueIteration(res.mdp, 0, threads));
  res.record.verifySeconds = secondsSince(t0);
  res.record.initialValue = res.policy->initialValue(res.mdp.initialState);
  return res;
}

FeedbackController makeController(const Abstraction& abs, std::shared_ptr<const RobustPolicy> policy) {
  return extractController(std::move(policy), abs.actions, abs.model->system, abs.model->partition,
                           abs.labels);
}

SimulationReport validateController(const Abstraction& abs, const FeedbackController& controller,
                                    std::uint64_t seed, long long trials, unsigned threads,
                                    std::uint64_t streamOffset, int dumpTrials) {
  const Model& m = *abs.model;
  SimulationOptions opt;
  opt.threads = threads;
  opt.streamOffset = streamOffset;
  opt.dumpTrials = dumpTrials;
  const NoiseSource noise = m.noise.withSeed(seed);
  std::optional<NoiseSource> stepNoise;
  if (m.groupSteps > 1 && m.stepNoise) {
    stepNoise = m.stepNoise->withSeed(seed);
    opt.concreteSystem = &m.base;
    opt.concreteNoise = &*stepNoise;
  }
  return simulate(m.system, controller, m.spec, noise, trials, opt);
}

RunArtifacts runSynthesis(std::shared_ptr<const Model> model, const RunConfig& config) {
  config.validate();
  RunArtifacts art;
  art.threshold = config.threshold.value_or(model->spec.threshold);
  art.abstraction = buildAbstraction(model, config.threads);
  ++art.abstractionBuilds;
  const Abstraction& abs = art.abstraction;

  const NoiseSource noise = model->noise.withSeed(config.abstractionSeed);
  const auto schedule = sampleSchedule(config);
  const bool write = !config.outDir.empty();
  if (write) std::filesystem::create_directories(config.outDir);

  std::vector<Vector> pooled;
  std::optional<NoiseSource::Stream> poolStream;
  if (config.cumulative) poolStream.emplace(noise.stream(0));

  for (std::size_t z = 0; z < schedule.size(); ++z) {
    const int N = schedule[z];
    std::vector<Vector> fresh;
    std::span<const Vector> samples;
    if (config.cumulative) {
      while (static_cast<int>(pooled.size()) < N) pooled.push_back(poolStream->next());
      samples = std::span<const Vector>(pooled.data(), static_cast<std::size_t>(N));
    } else {
      fresh = drawAbstractionSamples(noise, N, z);
      samples = fresh;
    }

    const auto t0 = Clock::now();
    std::optional<IntervalTable> table;
    if (!config.frequentist) table = tableFor(config, N);
    const double tableSeconds = secondsSince(t0);

    auto res = runIteration(abs, samples, table ? &*table : nullptr, config.beta, config.threads);
    res.record.iteration = static_cast<int>(z);
    res.record.intervalSeconds += tableSeconds;
    art.iterations.push_back(res.record);
    art.policy = res.policy;
    art.lastModel = std::move(res.mdp);
    if (write) writeIterations(art.iterations, config.outDir / "iterations.csv");

    if (res.record.initialValue >= art.threshold) {
      art.controllerFound = true;
      break;
    }
  }

  if (art.controllerFound && config.validationTrials > 0) {
    const auto controller = makeController(abs, art.policy);
    art.validation = validateController(abs, controller, config.validationSeed, config.validationTrials,
                                        config.threads);
  }

  if (write) {
    if (art.controllerFound) exportPolicyCsv(*art.policy, config.outDir / "policy.csv");
    if (config.exportModel && art.lastModel) exportInterchange(*art.lastModel, config.outDir / "model.imdp");
    if (art.validation) writeValidation(*art.validation, config.outDir / "validation.csv");

    nlohmann::json manifest;
    manifest["version"] = PACIMDP_VERSION;
    manifest["model"] = model->source;
    manifest["config"] = {{"beta", config.beta},
                          {"N0", config.N0},
                          {"gamma", config.gamma},
                          {"maxN", config.maxN},
                          {"maxIterations", config.maxIterations},
                          {"threshold", art.threshold},
                          {"abstractionSeed", config.abstractionSeed},
                          {"validationSeed", config.validationSeed},
                          {"cumulative", config.cumulative},
                          {"frequentist", config.frequentist},
                          {"validationTrials", config.validationTrials}};
    manifest["result"] = {{"controllerFound", art.controllerFound},
                          {"iterations", art.iterations.size()},
                          {"abstractionBuilds", art.abstractionBuilds},
                          {"abstractionSeconds", abs.seconds},
                          {"initialValue", art.iterations.empty() ? 0.0 : art.iterations.back().initialValue}};
    if (art.validation) {
      manifest["validation"] = {{"trials", art.validation->trials},
                                {"empirical", art.validation->empiricalProbability},
                                {"empiricalStrict", art.validation->empiricalProbabilityStrict},
                                {"wilson", {art.validation->wilson.lower, art.validation->wilson.upper}}};
    }
    auto out = openOutput(config.outDir / "manifest.json");
    out << manifest.dump(2) << '\n';
  }
  return art;
}

RobustPolicy importPolicyCsv(const std::filesystem::path& path, Index numStates,
                             const LabelledRegions& labels) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("k,state,action,value", 0) != 0)
    throw ModelError(path.string() + ": not a policy file");

  struct Row {
    int k;
    Index state;
    Index action;
    double value;
  };
  std::vector<Row> rows;
  int horizon = 0;
  std::size_t lineNo = 1;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.empty()) continue;
    std::istringstream ls(line);
    Row r{};
    char c1 = 0, c2 = 0, c3 = 0;
    if (!(ls >> r.k >> c1 >> r.state >> c2 >> r.action >> c3 >> r.value) || c1 != ',' || c2 != ',' || c3 != ',')
      throw ModelError(path.string() + ":" + std::to_string(lineNo) + ": malformed row");
    if (r.k < 0 || r.state < 0 || r.state >= numStates)
      throw ModelError(path.string() + ":" + std::to_string(lineNo) + ": index out of range");
    horizon = std::max(horizon, r.k + 1);
    rows.push_back(r);
  }
  if (horizon == 0) throw ModelError(path.string() + ": empty policy");

  RobustPolicy p;
  p.horizon = horizon;
  const auto S = static_cast<std::size_t>(numStates);
  p.choice.assign(static_cast<std::size_t>(horizon), std::vector<Index>(S, RobustPolicy::kNoAction));
  p.values.assign(static_cast<std::size_t>(horizon) + 1, std::vector<double>(S, 0.0));
  for (const auto& r : rows) {
    p.choice[static_cast<std::size_t>(r.k)][static_cast<std::size_t>(r.state)] = r.action;
    p.values[static_cast<std::size_t>(r.k)][static_cast<std::size_t>(r.state)] = r.value;
  }
  for (Index g : labels.goal) p.values.back()[static_cast<std::size_t>(g)] = 1.0;
  return p;
}

std::vector<SweepRow> soundnessSweep(const Abstraction& abs, const std::vector<int>& sampleSizes,
                                     int repetitions, long long trials, double beta,
                                     std::uint64_t abstractionSeed, std::uint64_t validationSeed,
                                     bool includeFrequentist, unsigned threads) {
  if (abstractionSeed == validationSeed) throw ModelError("abstraction and validation seeds must differ");
  const NoiseSource noise = abs.model->noise.withSeed(abstractionSeed);
  std::vector<SweepRow> out;
  for (std::size_t i = 0; i < sampleSizes.size(); ++i) {
    const int N = sampleSizes[i];
    const IntervalTable table(N, beta, threads);
    for (int r = 0; r < repetitions; ++r) {
      const auto samples = drawAbstractionSamples(noise, N, i * static_cast<std::size_t>(repetitions) + r);
      const std::uint64_t offset = static_cast<std::uint64_t>(r) * static_cast<std::uint64_t>(trials);
      for (int variant = 0; variant < (includeFrequentist ? 2 : 1); ++variant) {
        const bool freq = variant == 1;
        auto res = runIteration(abs, samples, freq ? nullptr : &table, beta, threads);
        const auto controller = makeController(abs, res.policy);
        const auto rep = validateController(abs, controller, validationSeed, trials, threads, offset);
        out.push_back({N, r, freq, res.record.initialValue, rep.empiricalProbability, rep.wilson.halfWidth()});
      }
    }
  }
  return out;
}

void exportSweepCsv(const std::vector<SweepRow>& rows, const std::filesystem::path& perRun,
                    const std::filesystem::path& summary) {
  {
    auto out = openOutput(perRun);
    out << "N,repetition,model,guarantee,empirical,wilson_half_width,violated\n";
    for (const auto& r : rows) {
      out << r.N << ',' << r.repetition << ',' << (r.frequentist ? "mdp" : "imdp") << ',' << r.guarantee << ','
          << r.empirical << ',' << r.halfWidth << ',' << r.violated() << '\n';
    }
  }
  struct Acc {
    std::vector<double> guarantee, empirical;
  };
  std::map<std::pair<bool, int>, Acc> groups;
  for (const auto& r : rows) {
    auto& g = groups[{r.frequentist, r.N}];
    g.guarantee.push_back(r.guarantee);
    g.empirical.push_back(r.empirical);
  }
  auto meanSd = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::pair{m, v.size() > 1 ? std::sqrt(s / static_cast<double>(v.size() - 1)) : 0.0};
  };
  auto out = openOutput(summary);
  out << "model,N,guarantee_mean,guarantee_sd,empirical_mean,empirical_sd\n";
  for (const auto& [key, g] : groups) {
    const auto [gm, gs] = meanSd(g.guarantee);
    const auto [em, es] = meanSd(g.empirical);
    out << (key.first ? "mdp" : "imdp") << ',' << key.second << ',' << gm << ',' << gs << ',' << em << ',' << es << '\n';
  }
}

}  // namespace pacimdp
