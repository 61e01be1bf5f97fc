#pragma once

#include "pacimdp/checker.hpp"
#include "pacimdp/imdp.hpp"
#include "pacimdp/model_io.hpp"
#include "pacimdp/scenario.hpp"
#include "pacimdp/simulator.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <vector>

namespace pacimdp {

struct RunConfig {
  double beta = 0.01;
  int N0 = 25;
  double gamma = 2.0;
  int maxN = 12800;
  int maxIterations = 10;
  std::optional<double> threshold;  ///< overrides the model's threshold
  std::uint64_t abstractionSeed = 1;
  std::uint64_t validationSeed = 2;
  std::filesystem::path outDir;     ///< empty: write nothing
  std::filesystem::path tableCache; ///< empty: tables are not cached
  unsigned threads = 0;
  bool cumulative = false;  ///< reuse a growing prefix of one sample stream
  bool frequentist = false; ///< point-estimate MDP instead of the iMDP
  long long validationTrials = 0;
  bool exportModel = false;

  /// Throws ModelError unless gamma > 1, 0 < beta < 1, 1 <= N0 <= maxN,
  /// maxIterations >= 1 and the two seeds differ.
  void validate() const;
};

/// Sample sizes N0, gamma N0, gamma^2 N0, ... capped at maxN, one per
/// iteration (the cap repeats once reached).
std::vector<int> sampleSchedule(const RunConfig& config);

struct IterationRecord {
  int iteration = 0;
  int N = 0;
  ModelStats stats;
  double intervalSeconds = 0.0;
  double buildSeconds = 0.0;
  double verifySeconds = 0.0;
  double initialValue = 0.0;
};

/// Everything that does not depend on the noise samples. Built once per run.
struct Abstraction {
  std::shared_ptr<const Model> model;
  ActionSet actions;
  LabelledRegions labels;
  Index initialRegion = 0;
  double seconds = 0.0;
};

Abstraction buildAbstraction(std::shared_ptr<const Model> model, unsigned threads = 0);

/// One pass of the loop body: count samples, build the (i)MDP, verify.
struct IterationResult {
  IntervalMdp mdp;
  std::shared_ptr<RobustPolicy> policy;
  IterationRecord record;
};

IterationResult runIteration(const Abstraction& abs, std::span<const Vector> samples,
                             const IntervalTable* table, double beta, unsigned threads = 0);

struct RunArtifacts {
  Abstraction abstraction;
  std::vector<IterationRecord> iterations;
  bool controllerFound = false;
  int abstractionBuilds = 0;
  double threshold = 0.0;
  std::shared_ptr<RobustPolicy> policy;  ///< last iteration's policy
  std::optional<IntervalMdp> lastModel;
  std::optional<SimulationReport> validation;

  /// 0 when a controller was found, 2 otherwise.
  int exitCode() const { return controllerFound ? 0 : 2; }
};

/**
 * Iterative abstraction: draw N samples, build and verify, and grow N by
 * gamma until the guarantee at the initial state reaches the threshold or
 * the iteration budget runs out. Writes iterations.csv, manifest.json and,
 * on success, policy.csv into config.outDir (plus model.imdp and
 * validation.csv when requested).
 */
RunArtifacts runSynthesis(std::shared_ptr<const Model> model, const RunConfig& config);

FeedbackController makeController(const Abstraction& abs, std::shared_ptr<const RobustPolicy> policy);

/// Monte Carlo validation with the configured validation seed; grouped
/// models with step noise are simulated at the concrete step resolution.
SimulationReport validateController(const Abstraction& abs, const FeedbackController& controller,
                                    std::uint64_t seed, long long trials, unsigned threads = 0,
                                    std::uint64_t streamOffset = 0, int dumpTrials = 0);

/// Reads a policy written by exportPolicyCsv. Value rows are restored for
/// k < horizon; terminal values are recomputed from the labels.
RobustPolicy importPolicyCsv(const std::filesystem::path& path, Index numStates,
                             const LabelledRegions& labels);

struct SweepRow {
  int N = 0;
  int repetition = 0;
  bool frequentist = false;
  double guarantee = 0.0;
  double empirical = 0.0;
  double halfWidth = 0.0;

  /// Guarantee above the empirical probability by more than 2 half-widths.
  bool violated() const { return guarantee > empirical + 2.0 * halfWidth; }
};

/**
 * Repeated full pipeline at fixed sample sizes: for each N and repetition,
 * fresh abstraction samples, one (i)MDP, one policy and a validation run
 * with fresh noise. Abstraction samples come from stream
 * (index of N) * repetitions + repetition; validation trial t of
 * repetition r uses stream r * trials + t.
 */
std::vector<SweepRow> soundnessSweep(const Abstraction& abs, const std::vector<int>& sampleSizes,
                                     int repetitions, long long trials, double beta,
                                     std::uint64_t abstractionSeed, std::uint64_t validationSeed,
                                     bool includeFrequentist, unsigned threads = 0);

/// Per-row CSV plus the aggregate (N, guarantee mean, empirical mean, sd).
void exportSweepCsv(const std::vector<SweepRow>& rows, const std::filesystem::path& perRun,
                    const std::filesystem::path& summary);

}  // namespace pacimdp
