#pragma once

#include "pacimdp/linear_system.hpp"
#include "pacimdp/partition.hpp"

#include <span>
#include <vector>

namespace pacimdp {

/**
 * Abstract actions. Action j steers the noiseless successor onto targets[j];
 * enabled[i] lists (ascending, no duplicates) the actions whose backward
 * reachable set contains region i.
 */
struct ActionSet {
  std::vector<Vector> targets;
  std::vector<std::vector<Index>> enabled;

  Index actionCount() const { return static_cast<Index>(targets.size()); }
  /// Number of (region, action) pairs.
  Index choiceCount() const;
  /// For every action, the ascending list of regions in which it is enabled.
  std::vector<std::vector<Index>> enablingRegions() const;
};

/// One action per region, targeting the region center.
std::vector<Vector> centerTargets(const Partition& part);

/**
 * Set of states from which some admissible input steers the noiseless
 * successor exactly onto d, in half-space form. With square invertible B this
 * is {x | u_min <= B^-1 (d - q - A x) <= u_max}; otherwise the facets of the
 * zonotope A^-1 (d - q - B U) are enumerated. The center is the image of the
 * input box center.
 *
 * Throws ModelError when A is singular or B is not full row rank.
 */
Polytope backwardReachSet(const LinearSystem& sys, const Vector& d);

/// Axis-aligned bounding box of backwardReachSet(sys, d).
Box backwardReachBounds(const LinearSystem& sys, const Vector& d);

/// Tolerance applied to every inequality in the containment test.
inline constexpr double kContainmentTolerance = 1e-9;

/// Enabled actions by vertex containment of each grid cell in each backward
/// reachable set. Parallel over actions (threads = 0 uses the default).
ActionSet enabledActions(const LinearSystem& sys, const Partition& part,
                         std::vector<Vector> targets, unsigned threads = 0);

struct ControlResult {
  Vector u;
  bool withinBounds = true;
};

/**
 * Piecewise-affine control law u = B^+ (d - q - A x). The pseudoinverse is
 * computed once. Coordinates outside the input box by at most
 * kContainmentTolerance are clamped; anything further is returned unclamped
 * with withinBounds = false.
 */
class ControlLaw {
 public:
  explicit ControlLaw(const LinearSystem& sys);

  ControlResult operator()(const Vector& target, const Vector& x) const;
  const Matrix& pseudoInverse() const { return pinv_; }

 private:
  Matrix A_;
  Vector q_;
  Box inputBox_;
  Matrix pinv_;
};

ControlResult controlInput(const LinearSystem& sys, const Vector& d, const Vector& x);

}  // namespace pacimdp
