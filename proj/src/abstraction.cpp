#include "pacimdp/abstraction.hpp"

#include "pacimdp/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pacimdp {

namespace {

void requireInvertibleDynamics(const LinearSystem& sys) {
  Eigen::JacobiSVD<Matrix> svd(sys.A);
  const auto& s = svd.singularValues();
  if (!(s(s.size() - 1) > 1e-8 * s(0)))
    throw ModelError("backward reachable sets need an invertible A");
  if (inputRank(sys.B).rank < sys.stateDim())
    throw ModelError("backward reachable sets need B with full row rank");
}

// Zonotope center + generators of A^-1 (d - q - B U).
struct Zonotope {
  Vector center;
  Matrix generators;
};

Zonotope reachZonotope(const LinearSystem& sys, const Vector& d) {
  const Eigen::PartialPivLU<Matrix> lu(sys.A);
  const Vector mid = 0.5 * (sys.inputBox.lower + sys.inputBox.upper);
  const Vector half = 0.5 * (sys.inputBox.upper - sys.inputBox.lower);
  Zonotope z;
  z.center = lu.solve(d - sys.q - sys.B * mid);
  z.generators = -lu.solve(sys.B) * half.asDiagonal();
  return z;
}

// Facets of a zonotope: one normal per (n-1)-subset of generators that spans
// a hyperplane.
Polytope zonotopeHalfspaces(const Zonotope& z) {
  const auto n = z.generators.rows();
  const auto k = z.generators.cols();
  std::vector<Vector> normals;
  std::vector<int> subset(static_cast<std::size_t>(n - 1));
  std::iota(subset.begin(), subset.end(), 0);
  while (true) {
    Vector normal;
    if (n == 1) {
      normal = Vector::Ones(1);
    } else {
      Matrix sub(n, n - 1);
      for (Eigen::Index c = 0; c < n - 1; ++c) sub.col(c) = z.generators.col(subset[c]);
      Eigen::JacobiSVD<Matrix> svd(sub, Eigen::ComputeFullU);
      const auto& s = svd.singularValues();
      if (s(s.size() - 1) > 1e-10 * std::max(1.0, s(0))) normal = svd.matrixU().col(n - 1);
    }
    if (normal.size() > 0) {
      const bool duplicate = std::any_of(normals.begin(), normals.end(), [&](const Vector& v) {
        return std::abs(std::abs(v.dot(normal)) - 1.0) < 1e-12;
      });
      if (!duplicate) normals.push_back(normal);
    }
    // next combination
    int i = static_cast<int>(n) - 2;
    while (i >= 0 && subset[i] == k - (n - 1) + i) --i;
    if (i < 0) break;
    ++subset[i];
    for (int j = i + 1; j < n - 1; ++j) subset[j] = subset[j - 1] + 1;
  }

  Polytope poly;
  poly.M.resize(2 * static_cast<Eigen::Index>(normals.size()), n);
  poly.b.resize(poly.M.rows());
  for (std::size_t r = 0; r < normals.size(); ++r) {
    const Vector& c = normals[r];
    const double spread = (c.transpose() * z.generators).cwiseAbs().sum();
    const double offset = c.dot(z.center);
    poly.M.row(2 * r) = c.transpose();
    poly.b(2 * r) = offset + spread;
    poly.M.row(2 * r + 1) = -c.transpose();
    poly.b(2 * r + 1) = -offset + spread;
  }
  poly.center = z.center;
  return poly;
}

// Box-in-polytope test through the support function of the box.
bool boxInside(const Polytope& poly, const Vector& center, const Vector& half, double tol) {
  for (Eigen::Index r = 0; r < poly.M.rows(); ++r) {
    const auto row = poly.M.row(r);
    const double support = row.dot(center) + row.cwiseAbs().dot(half);
    if (support > poly.b(r) + tol) return false;
  }
  return true;
}

}  // namespace

Index ActionSet::choiceCount() const {
  Index total = 0;
  for (const auto& e : enabled) total += static_cast<Index>(e.size());
  return total;
}

std::vector<std::vector<Index>> ActionSet::enablingRegions() const {
  std::vector<std::vector<Index>> out(targets.size());
  for (Index i = 0; i < static_cast<Index>(enabled.size()); ++i) {
    for (Index j : enabled[i]) out[j].push_back(i);
  }
  return out;
}

std::vector<Vector> centerTargets(const Partition& part) {
  std::vector<Vector> targets;
  targets.reserve(static_cast<std::size_t>(part.regionCount()));
  for (Index i = 0; i < part.regionCount(); ++i) targets.push_back(part.regionCenter(i));
  return targets;
}

Polytope backwardReachSet(const LinearSystem& sys, const Vector& d) {
  requireInvertibleDynamics(sys);
  const int n = sys.stateDim();
  if (sys.inputDim() != n) return zonotopeHalfspaces(reachZonotope(sys, d));

  const Eigen::PartialPivLU<Matrix> lu(sys.B);
  const Matrix K = lu.solve(sys.A);
  const Vector c0 = lu.solve(d - sys.q);
  Polytope poly;
  poly.M.resize(2 * n, n);
  poly.b.resize(2 * n);
  // u = c0 - K x; u >= u_min and u <= u_max
  poly.M.topRows(n) = K;
  poly.b.head(n) = c0 - sys.inputBox.lower;
  poly.M.bottomRows(n) = -K;
  poly.b.tail(n) = sys.inputBox.upper - c0;
  poly.center = reachZonotope(sys, d).center;
  return poly;
}

Box backwardReachBounds(const LinearSystem& sys, const Vector& d) {
  const Zonotope z = reachZonotope(sys, d);
  const Vector extent = z.generators.cwiseAbs().rowwise().sum();
  return Box{z.center - extent, z.center + extent};
}

ActionSet enabledActions(const LinearSystem& sys, const Partition& part,
                         std::vector<Vector> targets, unsigned threads) {
  if (sys.stateDim() != part.dim()) throw ModelError("system and partition dimensions differ");
  requireInvertibleDynamics(sys);
  const int n = part.dim();
  const Vector half = 0.5 * part.widths();

  std::vector<std::vector<Index>> regionsPerAction(targets.size());
  parallelFor(targets.size(), threads, [&](std::size_t j) {
    const Polytope reach = backwardReachSet(sys, targets[j]);
    const Box bounds = backwardReachBounds(sys, targets[j]);

    // Only cells inside the bounding box can be inside the set.
    std::vector<int> from(n), to(n);
    for (int d = 0; d < n; ++d) {
      const double slack = kContainmentTolerance + 1e-12 * std::abs(bounds.upper(d));
      from[d] = part.counts()[d];
      to[d] = 0;
      for (int c = 0; c < part.counts()[d]; ++c) {
        if (part.cellLower(d, c) >= bounds.lower(d) - slack &&
            part.cellUpper(d, c) <= bounds.upper(d) + slack) {
          from[d] = std::min(from[d], c);
          to[d] = c + 1;
        }
      }
      if (from[d] >= to[d]) return;
    }

    std::vector<int> coords(from);
    Vector center(n);
    while (true) {
      for (int d = 0; d < n; ++d)
        center(d) = 0.5 * (part.cellLower(d, coords[d]) + part.cellUpper(d, coords[d]));
      if (boxInside(reach, center, half, kContainmentTolerance))
        regionsPerAction[j].push_back(part.flatIndex(coords));
      int d = n - 1;
      while (d >= 0 && ++coords[d] == to[d]) {
        coords[d] = from[d];
        --d;
      }
      if (d < 0) break;
    }
  });

  ActionSet set;
  set.targets = std::move(targets);
  set.enabled.resize(static_cast<std::size_t>(part.regionCount()));
  for (std::size_t j = 0; j < regionsPerAction.size(); ++j) {
    for (Index i : regionsPerAction[j]) set.enabled[i].push_back(static_cast<Index>(j));
  }
  return set;
}

ControlLaw::ControlLaw(const LinearSystem& sys)
    : A_(sys.A),
      q_(sys.q),
      inputBox_(sys.inputBox),
      pinv_(sys.B.completeOrthogonalDecomposition().pseudoInverse()) {}

ControlResult ControlLaw::operator()(const Vector& target, const Vector& x) const {
  ControlResult result{pinv_ * (target - q_ - A_ * x), true};
  for (Eigen::Index i = 0; i < result.u.size(); ++i) {
    double& ui = result.u(i);
    if (ui < inputBox_.lower(i)) {
      if (ui < inputBox_.lower(i) - kContainmentTolerance) result.withinBounds = false;
    } else if (ui > inputBox_.upper(i)) {
      if (ui > inputBox_.upper(i) + kContainmentTolerance) result.withinBounds = false;
    }
  }
  if (result.withinBounds) result.u = result.u.cwiseMax(inputBox_.lower).cwiseMin(inputBox_.upper);
  return result;
}

ControlResult controlInput(const LinearSystem& sys, const Vector& d, const Vector& x) {
  return ControlLaw(sys)(d, x);
}

}  // namespace pacimdp
