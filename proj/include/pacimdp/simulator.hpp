#pragma once

#include "pacimdp/checker.hpp"
#include "pacimdp/noise.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace pacimdp {

struct TrajectoryPoint {
  int trial = 0;
  int k = 0;
  Vector x;
};

struct WilsonInterval {
  double lower = 0.0;
  double upper = 1.0;
  double halfWidth() const { return 0.5 * (upper - lower); }
};

/// 95% Wilson score interval for successes out of trials.
WilsonInterval wilsonInterval(long long successes, long long trials, double z = 1.959963984540054);

struct SimulationReport {
  long long trials = 0;
  long long successes = 0;
  /// Successes that also never hit a critical region or left the domain at
  /// intermediate concrete steps (equals successes without a concrete model).
  long long successesStrict = 0;
  /// Control inputs outside the input box beyond tolerance (should be 0).
  long long inputViolations = 0;
  double empiricalProbability = 0.0;
  double empiricalProbabilityStrict = 0.0;
  WilsonInterval wilson;
  std::vector<TrajectoryPoint> trajectories;
};

struct SimulationOptions {
  unsigned threads = 0;
  /// Trial t draws from noise stream streamOffset + t.
  std::uint64_t streamOffset = 0;
  /// Keep full trajectories of the first dumpTrials trials.
  int dumpTrials = 0;
  /// For grouped systems: the per-step system and per-step noise. When set,
  /// each abstract step is simulated as stepsPerAbstractAction concrete steps
  /// and intermediate states are checked for the strict statistic.
  const LinearSystem* concreteSystem = nullptr;
  const NoiseSource* concreteNoise = nullptr;
};

/**
 * Closed-loop Monte Carlo. A trial succeeds on the first entry of the
 * continuous state into a goal box within the controller horizon; it fails
 * on entering a critical box, leaving the partition domain, a halt outside
 * the goal, or running out of steps.
 */
SimulationReport simulate(const LinearSystem& sys, const FeedbackController& controller,
                          const ReachAvoidSpec& spec, const NoiseSource& noise, long long trials,
                          const SimulationOptions& options = {});

void exportTrajectoriesCsv(const SimulationReport& report, const std::filesystem::path& path);

}  // namespace pacimdp
