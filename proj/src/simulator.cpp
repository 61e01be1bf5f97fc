#include "pacimdp/simulator.hpp"

#include "pacimdp/parallel.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace pacimdp {

namespace {

struct TrialOutcome {
  bool success = false;
  bool strictSuccess = false;
  int inputViolations = 0;
};

}  // namespace

WilsonInterval wilsonInterval(long long successes, long long trials, double z) {
  if (trials <= 0) return {};
  const double n = static_cast<double>(trials);
  const double p = successes / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

SimulationReport simulate(const LinearSystem& sys, const FeedbackController& controller,
                          const ReachAvoidSpec& spec, const NoiseSource& noise, long long trials,
                          const SimulationOptions& options) {
  const int n = sys.stateDim();
  if (spec.initialState.size() != n) throw ModelError("initial state dimension mismatch");
  const bool concrete = options.concreteSystem != nullptr;
  if (concrete) {
    if (!options.concreteNoise) throw ModelError("concrete simulation needs per-step noise");
    if (options.concreteNoise->dim() != n) throw ModelError("noise dimension mismatch");
    if (options.concreteSystem->inputDim() * sys.stepsPerAbstractAction !=
        sys.inputDim() * options.concreteSystem->stepsPerAbstractAction)
      throw ModelError("concrete system does not match the grouped system");
  } else if (noise.dim() != n) {
    throw ModelError("noise dimension mismatch");
  }
  if (trials < 0) throw std::invalid_argument("trial count must be nonnegative");

  const Box domain = controller.partition().domain();
  const int horizon = controller.horizon();
  const int substeps = concrete ? sys.stepsPerAbstractAction / options.concreteSystem->stepsPerAbstractAction : 1;

  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(trials));
  std::vector<std::vector<TrajectoryPoint>> traces(
      static_cast<std::size_t>(std::max(0LL, std::min<long long>(options.dumpTrials, trials))));

  parallelFor(outcomes.size(), options.threads, [&](std::size_t t) {
    auto stream = (concrete ? *options.concreteNoise : noise).stream(options.streamOffset + t);
    auto* trace = t < traces.size() ? &traces[t] : nullptr;
    TrialOutcome& out = outcomes[t];
    Vector x = spec.initialState;
    if (trace) trace->push_back({static_cast<int>(t), 0, x});

    bool intermediateViolation = false;
    auto finish = [&](bool success) {
      out.success = success;
      out.strictSuccess = success && !intermediateViolation;
    };
    if (spec.inGoal(x)) return finish(true);
    if (spec.inCritical(x) || !domain.contains(x)) return finish(false);

    for (int k = 0; k < horizon; ++k) {
      const auto decision = controller(x, k);
      if (decision.halted()) return finish(decision.status == FeedbackController::Status::HaltGoal);
      if (!decision.withinBounds) ++out.inputViolations;

      if (concrete) {
        const LinearSystem& step = *options.concreteSystem;
        const auto p = step.inputDim();
        for (int i = 0; i < substeps; ++i) {
          x = step.step(x, decision.u.segment(static_cast<Eigen::Index>(i) * p, p), stream.next());
          if (i + 1 < substeps && (spec.inCritical(x) || !domain.contains(x)))
            intermediateViolation = true;
        }
      } else {
        x = sys.step(x, decision.u, stream.next());
      }
      if (trace) trace->push_back({static_cast<int>(t), k + 1, x});

      if (spec.inGoal(x)) return finish(true);
      if (spec.inCritical(x) || !domain.contains(x)) return finish(false);
    }
    finish(false);
  });

  SimulationReport report;
  report.trials = trials;
  for (const auto& o : outcomes) {
    report.successes += o.success;
    report.successesStrict += o.strictSuccess;
    report.inputViolations += o.inputViolations;
  }
  if (trials > 0) {
    report.empiricalProbability = static_cast<double>(report.successes) / trials;
    report.empiricalProbabilityStrict = static_cast<double>(report.successesStrict) / trials;
  }
  report.wilson = wilsonInterval(report.successes, trials);
  for (auto& tr : traces) {
    for (auto& pt : tr) report.trajectories.push_back(std::move(pt));
  }
  return report;
}

void exportTrajectoriesCsv(const SimulationReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(12);
  out << "trial,k";
  const auto n = report.trajectories.empty() ? 0 : report.trajectories.front().x.size();
  for (Eigen::Index i = 0; i < n; ++i) out << ",x" << i;
  out << '\n';
  for (const auto& pt : report.trajectories) {
    out << pt.trial << ',' << pt.k;
    for (Eigen::Index i = 0; i < pt.x.size(); ++i) out << ',' << pt.x(i);
    out << '\n';
  }
}

}  // namespace pacimdp
