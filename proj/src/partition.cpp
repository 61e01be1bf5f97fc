#include "pacimdp/partition.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pacimdp {

bool Polytope::contains(const Vector& x, double tol) const {
  return ((M * x - b).array() <= tol).all();
}

Polytope boxPolytope(const Box& box) {
  const int n = box.dim();
  Polytope poly;
  poly.M = Matrix::Zero(2 * n, n);
  poly.b.resize(2 * n);
  for (int i = 0; i < n; ++i) {
    poly.M(2 * i, i) = -1.0;
    poly.b(2 * i) = -box.lower(i);
    poly.M(2 * i + 1, i) = 1.0;
    poly.b(2 * i + 1) = box.upper(i);
  }
  poly.center = 0.5 * (box.lower + box.upper);
  const std::size_t nv = std::size_t{1} << n;
  poly.vertices.reserve(nv);
  for (std::size_t mask = 0; mask < nv; ++mask) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = (mask >> i) & 1U ? box.upper(i) : box.lower(i);
    poly.vertices.push_back(std::move(v));
  }
  return poly;
}

Polytope scaledPolytope(const Polytope& poly, double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("scale factor must be nonnegative");
  if (!poly.center) throw std::invalid_argument("scaling needs a Chebyshev center");
  const Vector& h = *poly.center;
  const Vector mh = poly.M * h;

  Polytope out;
  out.M = poly.M;
  out.b = lambda * (poly.b - mh) + mh;
  out.center = h;
  out.vertices.reserve(poly.vertices.size());
  for (const auto& v : poly.vertices) out.vertices.push_back(h + lambda * (v - h));
  return out;
}

Partition::Partition(Vector lower, Vector widths, std::vector<int> counts)
    : lower_(std::move(lower)), widths_(std::move(widths)), counts_(std::move(counts)) {
  const auto n = lower_.size();
  if (n == 0) throw ModelError("partition needs at least one dimension");
  if (widths_.size() != n || static_cast<Eigen::Index>(counts_.size()) != n)
    throw ModelError("partition lower/widths/counts dimensions differ");
  if (!lower_.allFinite() || !widths_.allFinite())
    throw ModelError("partition bounds must be finite");
  strides_.assign(counts_.size(), 1);
  total_ = 1;
  for (Eigen::Index d = n - 1; d >= 0; --d) {
    if (!(widths_(d) > 0.0)) throw ModelError("partition widths must be positive");
    if (counts_[d] < 1) throw ModelError("partition counts must be at least 1");
    strides_[d] = total_;
    total_ *= counts_[d];
  }
}

Vector Partition::upper() const {
  Vector up(dim());
  for (int d = 0; d < dim(); ++d) up(d) = cellUpper(d, counts_[d] - 1);
  return up;
}

double Partition::cellLower(int d, int c) const { return lower_(d) + c * widths_(d); }

double Partition::cellUpper(int d, int c) const { return lower_(d) + (c + 1) * widths_(d); }

// Returns -1 outside the axis range. The division only gives a guess; the
// final answer is decided against the same bounds regionBox() reports.
int Partition::coordOf(int d, double x) const {
  const int last = counts_[d] - 1;
  if (x < cellLower(d, 0) || x > cellUpper(d, last)) return -1;
  double guess = std::floor((x - lower_(d)) / widths_(d));
  int c = static_cast<int>(std::clamp(guess, 0.0, static_cast<double>(last)));
  while (c > 0 && x < cellLower(d, c)) --c;
  while (c < last && x >= cellUpper(d, c)) ++c;
  return c;
}

Index Partition::regionIndex(const Vector& x) const {
  Index idx = 0;
  for (int d = 0; d < dim(); ++d) {
    const int c = coordOf(d, x(d));
    if (c < 0) return absorbingIndex();
    idx += c * strides_[d];
  }
  return idx;
}

std::vector<int> Partition::cellCoords(Index region) const {
  if (region < 0 || region >= total_) throw std::out_of_range("region index out of range");
  std::vector<int> coords(counts_.size());
  for (std::size_t d = 0; d < counts_.size(); ++d) {
    coords[d] = static_cast<int>(region / strides_[d]);
    region %= strides_[d];
  }
  return coords;
}

Index Partition::flatIndex(std::span<const int> coords) const {
  Index idx = 0;
  for (std::size_t d = 0; d < counts_.size(); ++d) idx += coords[d] * strides_[d];
  return idx;
}

Box Partition::regionBox(Index region) const {
  const auto coords = cellCoords(region);
  Box box{Vector(dim()), Vector(dim())};
  for (int d = 0; d < dim(); ++d) {
    box.lower(d) = cellLower(d, coords[d]);
    box.upper(d) = cellUpper(d, coords[d]);
  }
  return box;
}

Vector Partition::regionCenter(Index region) const {
  const Box box = regionBox(region);
  return 0.5 * (box.lower + box.upper);
}

Polytope Partition::regionPolytope(Index region) const {
  if (region == absorbingIndex()) throw std::out_of_range("the absorbing region has no polytope");
  return boxPolytope(regionBox(region));
}

std::vector<Index> Partition::regionsInBox(const Box& box) const {
  if (box.dim() != dim()) throw ModelError("box dimension does not match the partition");
  std::vector<int> from(dim()), to(dim());
  for (int d = 0; d < dim(); ++d) {
    const double tol = 1e-9 * widths_(d);
    const double lo = (box.lower(d) - lower_(d)) / widths_(d);
    const double hi = (box.upper(d) - lower_(d)) / widths_(d);
    const double rlo = std::round(lo), rhi = std::round(hi);
    if (std::abs(lo - rlo) * widths_(d) > tol || std::abs(hi - rhi) * widths_(d) > tol ||
        rlo < 0 || rhi > counts_[d] || rhi <= rlo) {
      throw ModelError("box is not aligned with the partition in dimension " + std::to_string(d));
    }
    from[d] = static_cast<int>(rlo);
    to[d] = static_cast<int>(rhi);
  }
  std::vector<Index> out;
  std::vector<int> c(from);
  while (true) {
    out.push_back(flatIndex(c));
    int d = dim() - 1;
    while (d >= 0 && ++c[d] == to[d]) {
      c[d] = from[d];
      --d;
    }
    if (d < 0) break;
  }
  return out;
}

}  // namespace pacimdp
