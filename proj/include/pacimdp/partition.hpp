#pragma once

#include "pacimdp/linear_system.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace pacimdp {

/// Region / state index. Regions are numbered 0..regionCount()-1 and the
/// absorbing region (everything outside the grid) is regionCount().
using Index = std::int64_t;

/// H-polytope {x | M x <= b}.
struct Polytope {
  Matrix M;
  Vector b;
  std::optional<Vector> center;   ///< Chebyshev center, when known
  std::vector<Vector> vertices;   ///< filled for grid cells

  int dim() const { return static_cast<int>(M.cols()); }
  bool contains(const Vector& x, double tol = 0.0) const;
};

/// Rectangle as 2n half-spaces (-x_i <= -lo_i, x_i <= hi_i), with its center
/// and all 2^n vertices.
Polytope boxPolytope(const Box& box);

/**
 * Scales a polytope about its Chebyshev center h:
 * {x | M x <= lambda (b - M h) + M h}.
 * lambda = 1 is the identity and lambda1 < lambda2 gives nested sets.
 * Throws std::invalid_argument for negative lambda or a missing center.
 */
Polytope scaledPolytope(const Polytope& poly, double lambda);

/**
 * Uniform rectangular grid over the box [lower, lower + counts .* widths].
 *
 * Cells are half-open [lo, hi) along each axis except that the upper face of
 * the grid belongs to the last cell. Flat indices are row-major: the last
 * dimension varies fastest.
 */
class Partition {
 public:
  Partition(Vector lower, Vector widths, std::vector<int> counts);

  int dim() const { return static_cast<int>(lower_.size()); }
  Index regionCount() const { return total_; }
  Index absorbingIndex() const { return total_; }
  const Vector& lower() const { return lower_; }
  const Vector& widths() const { return widths_; }
  const std::vector<int>& counts() const { return counts_; }
  Vector upper() const;
  Box domain() const { return Box{lower_, upper()}; }

  /// Grid index of x, or absorbingIndex() when x lies outside the grid.
  Index regionIndex(const Vector& x) const;

  std::vector<int> cellCoords(Index region) const;
  Index flatIndex(std::span<const int> coords) const;

  /// Lower/upper bound of cell coordinate c along axis d.
  double cellLower(int d, int c) const;
  double cellUpper(int d, int c) const;

  Box regionBox(Index region) const;
  Vector regionCenter(Index region) const;
  /// Throws std::out_of_range for the absorbing index.
  Polytope regionPolytope(Index region) const;

  /// Regions whose union is exactly the given box; throws ModelError when the
  /// box faces do not coincide with grid lines (relative tolerance 1e-9).
  std::vector<Index> regionsInBox(const Box& box) const;

 private:
  int coordOf(int d, double x) const;

  Vector lower_;
  Vector widths_;
  std::vector<int> counts_;
  std::vector<Index> strides_;
  Index total_ = 0;
};

}  // namespace pacimdp
