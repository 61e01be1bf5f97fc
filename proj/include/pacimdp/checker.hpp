#pragma once

#include "pacimdp/abstraction.hpp"
#include "pacimdp/imdp.hpp"

#include <filesystem>
#include <memory>
#include <span>
#include <vector>

namespace pacimdp {

struct InnerMinResult {
  double value = 0.0;
  std::vector<double> worstDistribution;  ///< aligned with the row
};

/**
 * Minimum expected value over all distributions inside the row's intervals.
 * successorValues[i] is the value of row[i].successor.
 *
 * Every successor starts at its lower bound; the remaining mass goes to the
 * lowest-valued successors first, up to their upper bounds. Ties are broken
 * by successor index. Throws ModelError when the row is infeasible.
 */
InnerMinResult innerMin(std::span<const Transition> row, std::span<const double> successorValues);

/// Time-dependent robust policy for a bounded reach-avoid objective.
struct RobustPolicy {
  static constexpr Index kNoAction = -1;

  int horizon = 0;
  /// choice[k][s] for k in [0, horizon); kNoAction in goal, critical,
  /// absorbing and action-less states.
  std::vector<std::vector<Index>> choice;
  /// values[k][s] for k in [0, horizon]: worst-case probability of reaching
  /// the goal within horizon - k steps.
  std::vector<std::vector<double>> values;
  /// Non-terminal states without any enabled action (valued 0).
  std::vector<Index> stuckStates;

  double initialValue(Index state) const { return values.front().at(static_cast<std::size_t>(state)); }
};

/**
 * One Bellman backup: for every non-terminal state, the best action under
 * the worst-case distribution against `next`. Ties go to the smallest
 * action id. Terminal states take their fixed values (goal 1, critical and
 * absorbing 0).
 */
void robustBackup(const IntervalMdp& mdp, std::span<const double> next, std::span<double> out,
                  std::span<Index> choice, unsigned threads = 0);

/// Backward induction over mdp.horizon steps (or `horizon` when > 0).
RobustPolicy robustValueIteration(const IntervalMdp& mdp, int horizon = 0, unsigned threads = 0);

/// CSV with header k,state,action,value (rows for k < horizon).
void exportPolicyCsv(const RobustPolicy& policy, const std::filesystem::path& path);

/**
 * Piecewise-affine feedback controller phi(x, k): the action chosen for x's
 * region at step k, realised by u = B^+ (d - q - A x).
 */
class FeedbackController {
 public:
  enum class Status { Act, HaltGoal, HaltCritical, HaltAbsorbing, HaltNoAction };

  struct Decision {
    Status status = Status::HaltNoAction;
    Index region = 0;
    Index action = RobustPolicy::kNoAction;
    Vector u;
    bool withinBounds = true;

    bool halted() const { return status != Status::Act; }
  };

  FeedbackController(std::shared_ptr<const RobustPolicy> policy, const ActionSet& actions,
                     const LinearSystem& sys, const Partition& part,
                     const LabelledRegions& labels);

  int horizon() const { return policy_->horizon; }
  const Partition& partition() const { return part_; }
  const RobustPolicy& policy() const { return *policy_; }
  /// Throws std::out_of_range for k outside [0, horizon).
  Decision operator()(const Vector& x, int k) const;

 private:
  std::shared_ptr<const RobustPolicy> policy_;
  std::vector<Vector> targets_;
  Partition part_;
  ControlLaw law_;
  std::vector<char> goal_;
  std::vector<char> critical_;
};

FeedbackController extractController(std::shared_ptr<const RobustPolicy> policy,
                                      const ActionSet& actions, const LinearSystem& sys,
                                      const Partition& part, const LabelledRegions& labels);

}  // namespace pacimdp
