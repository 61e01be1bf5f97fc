#pragma once

#include "pacimdp/partition.hpp"

#include <filesystem>
#include <span>
#include <utility>
#include <vector>

namespace pacimdp {

struct ProbabilityInterval {
  double lower = 0.0;
  double upper = 1.0;

  bool operator==(const ProbabilityInterval&) const = default;
};

/**
 * Sum_{i=0}^{k} C(N, i) (1-p)^i p^(N-i), evaluated in log space. This is the
 * probability that at most k of N samples fall outside a set of mass p.
 * Returns 0 for k < 0 and 1 for k >= N.
 */
double binomialOutsideSum(int N, int k, double p);

/// Absolute tolerance of the bisection on each bound.
inline constexpr double kBoundTolerance = 1e-12;

/**
 * PAC lower bound on the probability of a region from which nOut of N
 * samples fell outside: 0 when nOut == N, else the root in (0, 1) of
 * binomialOutsideSum(N, nOut, p) = beta / (2N).
 * Throws std::invalid_argument unless 0 <= nOut <= N and 0 < beta < 1.
 */
double solveLowerBound(int N, double beta, int nOut);

/// Upper counterpart: 1 when nOut == 0, else the root of
/// 1 - binomialOutsideSum(N, nOut - 1, p) = beta / (2N).
double solveUpperBound(int N, double beta, int nOut);

/// Both bounds for every outside count 0..N at fixed (N, beta).
class IntervalTable {
 public:
  IntervalTable() = default;
  IntervalTable(int N, double beta, unsigned threads = 0);

  int sampleCount() const { return N_; }
  double beta() const { return beta_; }
  const ProbabilityInterval& operator[](int nOut) const { return rows_.at(static_cast<std::size_t>(nOut)); }
  const std::vector<ProbabilityInterval>& rows() const { return rows_; }

  /// Binary sidecar: one text header line, then (N + 1) pairs of
  /// little-endian doubles.
  void save(const std::filesystem::path& path) const;
  static IntervalTable load(const std::filesystem::path& path);

  /// Loads path if it holds the table for (N, beta), otherwise computes and
  /// writes it.
  static IntervalTable cached(const std::filesystem::path& dir, int N, double beta,
                              unsigned threads = 0);

  bool operator==(const IntervalTable&) const = default;

 private:
  int N_ = 0;
  double beta_ = 0.0;
  std::vector<ProbabilityInterval> rows_;
};

/**
 * Per-action successor counts. Because the noiseless successor of action j is
 * its target from every source state, one count vector per action serves all
 * states in which the action is enabled.
 */
struct SampleCounts {
  int N = 0;
  /// perAction[j]: (region, count) with count >= 1, ascending region; the
  /// absorbing region appears last when any sample left the grid.
  std::vector<std::vector<std::pair<Index, int>>> perAction;
};

/// Throws std::invalid_argument for an empty sample set or wrong dimensions.
SampleCounts countSamples(const Partition& part, std::span<const Vector> targets,
                          std::span<const Vector> samples, unsigned threads = 0);

/// Point estimates N_in / N for one action.
std::vector<std::pair<Index, double>> frequentistRow(const SampleCounts& counts, Index action);

}  // namespace pacimdp
