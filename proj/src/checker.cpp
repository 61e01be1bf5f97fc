#include "pacimdp/checker.hpp"

#include "pacimdp/parallel.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace pacimdp {

namespace {

constexpr double kFeasibilityTolerance = 1e-9;

// Worst-case expectation with scratch buffers; `order` is overwritten.
double worstCaseValue(std::span<const Transition> row, std::span<const double> stateValues,
                      std::vector<std::size_t>& order) {
  order.resize(row.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double va = stateValues[row[a].successor], vb = stateValues[row[b].successor];
    if (va != vb) return va < vb;
    return row[a].successor < row[b].successor;
  });
  double mass = 1.0;
  double value = 0.0;
  for (const auto& t : row) {
    mass -= t.lower;
    value += t.lower * stateValues[t.successor];
  }
  for (std::size_t i : order) {
    if (mass <= 0.0) break;
    const double add = std::min(row[i].upper - row[i].lower, mass);
    value += add * stateValues[row[i].successor];
    mass -= add;
  }
  return value;
}

}  // namespace

InnerMinResult innerMin(std::span<const Transition> row, std::span<const double> successorValues) {
  if (row.size() != successorValues.size())
    throw std::invalid_argument("one value per row entry is required");
  double lo = 0.0, hi = 0.0;
  for (const auto& t : row) {
    lo += t.lower;
    hi += t.upper;
  }
  if (row.empty() || lo > 1.0 + kFeasibilityTolerance || hi < 1.0 - kFeasibilityTolerance)
    throw ModelError("infeasible interval row");

  std::vector<std::size_t> order(row.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (successorValues[a] != successorValues[b]) return successorValues[a] < successorValues[b];
    return row[a].successor < row[b].successor;
  });

  InnerMinResult result;
  result.worstDistribution.resize(row.size());
  double mass = 1.0 - lo;
  for (std::size_t i = 0; i < row.size(); ++i) result.worstDistribution[i] = row[i].lower;
  for (std::size_t i : order) {
    if (mass <= 0.0) break;
    const double add = std::min(row[i].upper - row[i].lower, mass);
    result.worstDistribution[i] += add;
    mass -= add;
  }
  for (std::size_t i = 0; i < row.size(); ++i)
    result.value += result.worstDistribution[i] * successorValues[i];
  return result;
}

void robustBackup(const IntervalMdp& mdp, std::span<const double> next, std::span<double> out,
                  std::span<Index> choice, unsigned threads) {
  const auto S = static_cast<std::size_t>(mdp.numStates);
  if (next.size() != S || out.size() != S || choice.size() != S)
    throw std::invalid_argument("value buffers must have one entry per state");

  // Rows are shared, so each action's worst case is computed once per backup.
  const Index numActions = mdp.actionCount();
  std::vector<double> actionValue(static_cast<std::size_t>(numActions), 0.0);
  parallelFor(static_cast<std::size_t>(numActions), threads, [&](std::size_t a) {
    thread_local std::vector<std::size_t> order;
    if (!mdp.rows[a].empty()) actionValue[a] = worstCaseValue(mdp.rows[a], next, order);
  });

  std::vector<char> terminal(S, 0);
  std::fill(out.begin(), out.end(), 0.0);
  for (Index g : mdp.goalStates) {
    terminal[g] = 1;
    out[g] = 1.0;
  }
  for (Index c : mdp.criticalStates) terminal[c] = 1;
  terminal[mdp.absorbingState()] = 1;

  for (std::size_t s = 0; s < S; ++s) {
    choice[s] = RobustPolicy::kNoAction;
    if (terminal[s]) continue;
    double best = -1.0;
    for (Index a : mdp.enabled[s]) {
      if (actionValue[a] > best) {
        best = actionValue[a];
        choice[s] = a;
      }
    }
    out[s] = std::max(best, 0.0);
  }
}

RobustPolicy robustValueIteration(const IntervalMdp& mdp, int horizon, unsigned threads) {
  mdp.validate();
  RobustPolicy policy;
  policy.horizon = horizon > 0 ? horizon : mdp.horizon;
  if (policy.horizon < 1) throw ModelError("horizon must be at least 1");
  const auto S = static_cast<std::size_t>(mdp.numStates);

  policy.values.assign(static_cast<std::size_t>(policy.horizon) + 1, std::vector<double>(S, 0.0));
  policy.choice.assign(static_cast<std::size_t>(policy.horizon),
                       std::vector<Index>(S, RobustPolicy::kNoAction));
  for (Index g : mdp.goalStates) policy.values.back()[g] = 1.0;

  for (int k = policy.horizon - 1; k >= 0; --k)
    robustBackup(mdp, policy.values[k + 1], policy.values[k], policy.choice[k], threads);

  std::vector<char> terminal(S, 0);
  for (Index g : mdp.goalStates) terminal[g] = 1;
  for (Index c : mdp.criticalStates) terminal[c] = 1;
  terminal[mdp.absorbingState()] = 1;
  for (std::size_t s = 0; s < S; ++s) {
    if (!terminal[s] && mdp.enabled[s].empty()) policy.stuckStates.push_back(static_cast<Index>(s));
  }
  return policy;
}

void exportPolicyCsv(const RobustPolicy& policy, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(17);
  out << "k,state,action,value\n";
  for (int k = 0; k < policy.horizon; ++k) {
    for (std::size_t s = 0; s < policy.choice[k].size(); ++s)
      out << k << ',' << s << ',' << policy.choice[k][s] << ',' << policy.values[k][s] << '\n';
  }
}

FeedbackController::FeedbackController(std::shared_ptr<const RobustPolicy> policy,
                                       const ActionSet& actions, const LinearSystem& sys,
                                       const Partition& part, const LabelledRegions& labels)
    : policy_(std::move(policy)),
      targets_(actions.targets),
      part_(part),
      law_(sys),
      goal_(static_cast<std::size_t>(part.regionCount()), 0),
      critical_(static_cast<std::size_t>(part.regionCount()), 0) {
  if (!policy_) throw std::invalid_argument("controller needs a policy");
  for (Index g : labels.goal) goal_[g] = 1;
  for (Index c : labels.critical) critical_[c] = 1;
}

FeedbackController::Decision FeedbackController::operator()(const Vector& x, int k) const {
  if (k < 0 || k >= policy_->horizon) throw std::out_of_range("controller queried beyond its horizon");
  Decision d;
  d.region = part_.regionIndex(x);
  if (d.region == part_.absorbingIndex()) {
    d.status = Status::HaltAbsorbing;
  } else if (goal_[d.region]) {
    d.status = Status::HaltGoal;
  } else if (critical_[d.region]) {
    d.status = Status::HaltCritical;
  } else {
    d.action = policy_->choice[k][d.region];
    if (d.action == RobustPolicy::kNoAction) {
      d.status = Status::HaltNoAction;
    } else {
      auto r = law_(targets_[d.action], x);
      d.u = std::move(r.u);
      d.withinBounds = r.withinBounds;
      d.status = Status::Act;
    }
  }
  return d;
}

FeedbackController extractController(std::shared_ptr<const RobustPolicy> policy,
                                      const ActionSet& actions, const LinearSystem& sys,
                                      const Partition& part, const LabelledRegions& labels) {
  return FeedbackController(std::move(policy), actions, sys, part, labels);
}

}  // namespace pacimdp
