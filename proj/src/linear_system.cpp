#include "pacimdp/linear_system.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace pacimdp {

namespace {

constexpr double kRankTolerance = 1e-8;

double conditionNumber(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

}  // namespace

bool Box::contains(const Vector& x, double tol) const {
  for (int i = 0; i < dim(); ++i) {
    if (x(i) < lower(i) - tol || x(i) > upper(i) + tol) return false;
  }
  return true;
}

double Box::volume() const { return (upper - lower).prod(); }

Vector LinearSystem::step(const Vector& x, const Vector& u, const Vector& w) const {
  return A * x + B * u + q + w;
}

Vector LinearSystem::step(const Vector& x, const Vector& u) const { return A * x + B * u + q; }

LinearSystem makeSystem(Matrix A, Matrix B, Vector q, Box inputBox) {
  const auto n = A.rows();
  if (n == 0 || A.cols() != n) throw ModelError("A must be a nonempty square matrix");
  if (B.rows() != n || B.cols() == 0) throw ModelError("B must have as many rows as A");
  if (q.size() != n) throw ModelError("q must have the state dimension");
  if (inputBox.lower.size() != B.cols() || inputBox.upper.size() != B.cols())
    throw ModelError("input bounds must have one entry per input");
  if (!A.allFinite() || !B.allFinite() || !q.allFinite())
    throw ModelError("A, B and q must be finite");
  for (Eigen::Index i = 0; i < B.cols(); ++i) {
    if (!(inputBox.lower(i) <= inputBox.upper(i)))
      throw ModelError("input box is empty in dimension " + std::to_string(i));
  }
  return LinearSystem{std::move(A), std::move(B), std::move(q), std::move(inputBox), 1};
}

RankInfo inputRank(const Matrix& B) {
  RankInfo info;
  if (B.size() == 0) return info;
  Eigen::JacobiSVD<Matrix> svd(B);
  const auto& s = svd.singularValues();
  info.sigmaMax = s(0);
  // rank(B) = n requires n singular values, so p < n is rank deficient.
  info.sigmaMin = B.cols() >= B.rows() ? s(s.size() - 1) : 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > kRankTolerance * info.sigmaMax) ++info.rank;
  }
  return info;
}

LinearSystem groupSteps(const LinearSystem& sys, int m) {
  if (m < 1) throw ModelError("step grouping factor must be at least 1");
  if (m == 1) return sys;

  const int n = sys.stateDim();
  const int p = sys.inputDim();
  LinearSystem out;
  out.B.resize(n, static_cast<Eigen::Index>(p) * m);
  out.q = Vector::Zero(n);
  out.inputBox.lower.resize(static_cast<Eigen::Index>(p) * m);
  out.inputBox.upper.resize(static_cast<Eigen::Index>(p) * m);

  // Block i (0-based, applied at concrete step i) is A^{m-1-i} B.
  Matrix power = Matrix::Identity(n, n);
  for (int i = m - 1; i >= 0; --i) {
    out.B.middleCols(static_cast<Eigen::Index>(i) * p, p) = power * sys.B;
    out.q += power * sys.q;
    power = sys.A * power;
  }
  out.A = power;
  for (int i = 0; i < m; ++i) {
    out.inputBox.lower.segment(static_cast<Eigen::Index>(i) * p, p) = sys.inputBox.lower;
    out.inputBox.upper.segment(static_cast<Eigen::Index>(i) * p, p) = sys.inputBox.upper;
  }
  out.stepsPerAbstractAction = sys.stepsPerAbstractAction * m;

  const RankInfo rank = inputRank(out.B);
  if (rank.rank < n) {
    std::ostringstream os;
    os << "grouped input matrix is rank deficient after grouping " << m
       << " steps: rank " << rank.rank << " < " << n
       << ", smallest singular value " << rank.sigmaMin;
    throw ModelError(os.str());
  }
  return out;
}

bool ValidationReport::ok() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

std::string ValidationReport::str() const {
  std::ostringstream os;
  os << "rank(B) = " << rankB << ", sigma_min(B) = " << sigmaMinB
     << ", sigma_max(B) = " << sigmaMaxB << ", cond(A) = " << conditionA
     << ", cond(B) = " << conditionB << '\n';
  for (const auto& c : checks) {
    os << (c.passed ? "  [pass] " : "  [FAIL] ") << c.name;
    if (!c.detail.empty()) os << ": " << c.detail;
    os << '\n';
  }
  return os.str();
}

ValidationReport validateSystem(const LinearSystem& sys) {
  ValidationReport report;
  const auto n = sys.A.rows();

  const bool shapes = n > 0 && sys.A.cols() == n && sys.B.rows() == n && sys.q.size() == n &&
                      sys.inputBox.lower.size() == sys.B.cols() &&
                      sys.inputBox.upper.size() == sys.B.cols();
  report.checks.push_back({"dimensions", shapes, ""});
  if (!shapes) return report;

  const bool finite = sys.A.allFinite() && sys.B.allFinite() && sys.q.allFinite();
  report.checks.push_back({"finite entries", finite, ""});

  bool boxOk = true;
  for (Eigen::Index i = 0; i < sys.B.cols(); ++i) {
    boxOk = boxOk && sys.inputBox.lower(i) <= sys.inputBox.upper(i);
  }
  report.checks.push_back({"nonempty input box", boxOk, ""});
  if (!finite) return report;

  const RankInfo rank = inputRank(sys.B);
  report.rankB = rank.rank;
  report.sigmaMinB = rank.sigmaMin;
  report.sigmaMaxB = rank.sigmaMax;
  report.conditionA = conditionNumber(sys.A);
  report.conditionB = conditionNumber(sys.B);

  std::ostringstream detail;
  detail << "rank " << rank.rank << " of " << n;
  report.checks.push_back({"B full row rank", rank.rank == n, detail.str()});

  Eigen::JacobiSVD<Matrix> svdA(sys.A);
  const auto& sa = svdA.singularValues();
  const bool invertible = sa(sa.size() - 1) > kRankTolerance * sa(0);
  report.checks.push_back({"A invertible", invertible, ""});
  return report;
}

bool ReachAvoidSpec::inGoal(const Vector& x) const {
  for (const auto& b : goal) {
    if (b.contains(x)) return true;
  }
  return false;
}

bool ReachAvoidSpec::inCritical(const Vector& x) const {
  for (const auto& b : critical) {
    if (b.contains(x)) return true;
  }
  return false;
}

}  // namespace pacimdp
