#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace pacimdp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Thrown for malformed models, specs and configurations.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Closed axis-aligned box [lower, upper].
struct Box {
  Vector lower;
  Vector upper;

  int dim() const { return static_cast<int>(lower.size()); }
  bool contains(const Vector& x, double tol = 0.0) const;
  double volume() const;
};

/**
 * Discrete-time linear system x+ = A x + B u + q + w with box-constrained
 * inputs.
 *
 * When built by groupSteps(), one step of this system stands for
 * stepsPerAbstractAction steps of the original one, B is the stacked input
 * matrix and the input box is the replicated per-step box.
 */
struct LinearSystem {
  Matrix A;
  Matrix B;
  Vector q;
  Box inputBox;
  int stepsPerAbstractAction = 1;

  int stateDim() const { return static_cast<int>(A.rows()); }
  int inputDim() const { return static_cast<int>(B.cols()); }

  /// Noiseless update plus an explicit noise term.
  Vector step(const Vector& x, const Vector& u, const Vector& w) const;
  Vector step(const Vector& x, const Vector& u) const;
};

/// Checks shapes, finiteness and nonempty input bounds; throws ModelError.
LinearSystem makeSystem(Matrix A, Matrix B, Vector q, Box inputBox);

/**
 * Aggregates m consecutive steps into one:
 * A^m, [A^{m-1}B | ... | AB | B], sum_{i<m} A^i q, and the input box
 * repeated m times. The first input block acts first.
 *
 * m == 1 returns the system unchanged. Throws ModelError for m == 0 or when
 * the stacked input matrix is still not full row rank.
 */
LinearSystem groupSteps(const LinearSystem& sys, int m);

/// Numerical rank of B: singular values above 1e-8 times the largest.
struct RankInfo {
  int rank = 0;
  double sigmaMin = 0.0;
  double sigmaMax = 0.0;
};
RankInfo inputRank(const Matrix& B);

struct ValidationReport {
  struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
  };

  int rankB = 0;
  double sigmaMinB = 0.0;
  double sigmaMaxB = 0.0;
  double conditionA = 0.0;
  double conditionB = 0.0;
  std::vector<Check> checks;

  bool ok() const;
  std::string str() const;
};

/// Report-only validation: finiteness, input box, full row rank of B, and
/// invertibility of A. Never throws.
ValidationReport validateSystem(const LinearSystem& sys);

/// Bounded reach-avoid objective: reach a goal box within horizon steps
/// without entering a critical box.
struct ReachAvoidSpec {
  std::vector<Box> goal;
  std::vector<Box> critical;
  int horizon = 1;
  double threshold = 0.0;
  Vector initialState;

  bool inGoal(const Vector& x) const;
  bool inCritical(const Vector& x) const;
};

}  // namespace pacimdp
