#pragma once

#include "pacimdp/abstraction.hpp"
#include "pacimdp/partition.hpp"
#include "pacimdp/scenario.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace pacimdp {

struct Transition {
  Index successor = 0;
  double lower = 0.0;
  double upper = 0.0;

  bool operator==(const Transition&) const = default;
};

using IntervalRow = std::vector<Transition>;

/**
 * Interval MDP over the grid regions plus one absorbing state.
 *
 * Rows are stored once per action and shared by every state in which the
 * action is enabled. The absorbing state's only choice is the deadlock
 * action (index actionCount()) with interval [1, 1] back to itself.
 */
struct IntervalMdp {
  Index numStates = 0;
  std::vector<std::vector<Index>> enabled;  ///< per state, ascending action ids
  std::vector<IntervalRow> rows;            ///< per action id, deadlock last
  std::vector<Index> goalStates;            ///< ascending
  std::vector<Index> criticalStates;        ///< ascending
  Index initialState = 0;
  int sampleCount = 0;
  double beta = 0.0;
  int horizon = 0;

  Index absorbingState() const { return numStates - 1; }
  Index actionCount() const { return static_cast<Index>(rows.size()) - 1; }
  Index deadlockAction() const { return actionCount(); }

  Index choiceCount() const;
  Index choiceCountWithoutDeadlock() const { return choiceCount() - 1; }
  /// Sum over choices of the row length, counting shared rows per use.
  Index transitionCount() const;
  /// Interval entries actually stored.
  Index storedEntryCount() const;

  /// Throws ModelError on the first violated structural invariant.
  void validate() const;

  bool operator==(const IntervalMdp&) const = default;
};

/// Goal and critical regions resolved from the spec boxes; throws ModelError
/// when a box is not grid aligned or the two sets overlap.
struct LabelledRegions {
  std::vector<Index> goal;
  std::vector<Index> critical;
};
LabelledRegions labelRegions(const Partition& part, const ReachAvoidSpec& spec);

/// PAC interval MDP from per-action counts and the interval table for the
/// same N. Regions with no samples get no edge.
IntervalMdp buildImdp(const Partition& part, const ActionSet& actions, const SampleCounts& counts,
                      const IntervalTable& table, const ReachAvoidSpec& spec);

/// Same structure with point intervals [N_in/N, N_in/N]: the frequentist MDP.
IntervalMdp buildPointMdp(const Partition& part, const ActionSet& actions,
                          const SampleCounts& counts, const ReachAvoidSpec& spec);

/**
 * Text interchange format:
 *
 *   pacimdp-imdp 1
 *   states <S>
 *   actions <A>            (excluding the deadlock action, whose id is A)
 *   choices <C>
 *   transitions <T>
 *   initial <s>
 *   samples <N>
 *   beta <beta>
 *   horizon <K>
 *   goal <count> <ids...>
 *   critical <count> <ids...>
 *   <state> <action> <successor> [<lower>,<upper>]    one line per entry
 *
 * Lines are sorted by (state, action, successor); numbers use the shortest
 * round-trip representation, so re-reading gives an identical model.
 */
void writeInterchange(const IntervalMdp& mdp, std::ostream& out);
void exportInterchange(const IntervalMdp& mdp, const std::filesystem::path& path);
IntervalMdp readInterchange(std::istream& in);
IntervalMdp importInterchange(const std::filesystem::path& path);

/// One CSV line (no header) of model statistics.
struct ModelStats {
  Index states = 0;
  Index choices = 0;
  Index choicesWithoutDeadlock = 0;
  Index transitions = 0;
  Index storedEntries = 0;
};
ModelStats modelStats(const IntervalMdp& mdp);

}  // namespace pacimdp
