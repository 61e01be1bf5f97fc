#include "pacimdp/abstraction.hpp"

#include <doctest.h>

#include <random>

using namespace pacimdp;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

LinearSystem sys2(const Matrix& A, const Matrix& B, const Vector& q, double u = 1.0) {
  return makeSystem(A, B, q, Box{Vector::Constant(B.cols(), -u), Vector::Constant(B.cols(), u)});
}

LinearSystem basSystem() {
  Matrix A(2, 2), B(2, 2);
  A << 0.8820, 0.0058, 0.0134, 0.9625;
  B << 0.0584, 0, 0, 0.0241;
  return makeSystem(A, B, vec({0.9604, 1.3269}), Box{vec({14.0, -10.0}), vec({28.0, 10.0})});
}

}  // namespace

TEST_CASE("backward reachable set, identity") {
  const auto s = sys2(Matrix::Identity(2, 2), Matrix::Identity(2, 2), Vector::Zero(2));
  const auto g = backwardReachSet(s, Vector::Zero(2));
  CHECK(g.contains(vec({1.0, -1.0}), 1e-12));
  CHECK(g.contains(vec({-1.0, 1.0}), 1e-12));
  CHECK_FALSE(g.contains(vec({1.01, 0.0})));
  const auto bb = backwardReachBounds(s, Vector::Zero(2));
  CHECK(bb.lower.isApprox(vec({-1.0, -1.0})));
  CHECK(bb.upper.isApprox(vec({1.0, 1.0})));
}

TEST_CASE("backward reachable set with drift and gain") {
  const auto s = sys2(Matrix::Identity(2, 2), 2.0 * Matrix::Identity(2, 2), vec({1.0, 0.0}));
  const auto bb = backwardReachBounds(s, Vector::Zero(2));
  CHECK(bb.lower.isApprox(vec({-3.0, -2.0})));
  CHECK(bb.upper.isApprox(vec({1.0, 2.0})));
  const auto g = backwardReachSet(s, Vector::Zero(2));
  CHECK(g.contains(vec({-3.0, 2.0}), 1e-12));
  CHECK_FALSE(g.contains(vec({1.1, 0.0})));
}

TEST_CASE("backward reachable set under a shear") {
  Matrix A(2, 2);
  A << 1, 1, 0, 1;
  const auto s = sys2(A, Matrix::Identity(2, 2), Vector::Zero(2));
  const auto g = backwardReachSet(s, Vector::Zero(2));
  const Matrix Ainv = A.inverse();
  for (double a : {-1.0, 1.0})
    for (double b : {-1.0, 1.0}) CHECK(g.contains(Ainv * vec({a, b}), 1e-12));
  CHECK(g.contains(vec({-2.0, 1.0}), 1e-12));
  CHECK(g.contains(vec({2.0, -1.0}), 1e-12));
  CHECK_FALSE(g.contains(vec({2.0, 1.0})));
}

TEST_CASE("non-square input matrix uses the zonotope form") {
  Matrix B(2, 3);
  B << 1, 0, 1, 0, 1, 1;
  const auto s = sys2(Matrix::Identity(2, 2), B, Vector::Zero(2));
  const auto g = backwardReachSet(s, Vector::Zero(2));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const Vector u = vec({U(rng), U(rng), U(rng)});
    CHECK(g.contains(-B * u, 1e-9));
  }
  CHECK_FALSE(g.contains(vec({3.1, 0.0})));
  CHECK(g.contains(vec({2.0, 2.0}), 1e-9));
  CHECK_FALSE(g.contains(vec({2.0, -2.0})));
}

TEST_CASE("backward reachable set errors") {
  CHECK_THROWS_AS(backwardReachSet(sys2(Matrix::Zero(2, 2), Matrix::Identity(2, 2), Vector::Zero(2)), Vector::Zero(2)),
                  ModelError);
  Matrix B(2, 1);
  B << 0.5, 1;
  CHECK_THROWS_AS(backwardReachSet(sys2(Matrix::Identity(2, 2), B, Vector::Zero(2)), Vector::Zero(2)), ModelError);
}

TEST_CASE("enabled actions on a 5x5 unit grid") {
  const Partition p(vec({0.0, 0.0}), vec({1.0, 1.0}), {5, 5});
  const Index center = p.flatIndex(std::vector<int>{2, 2});

  // Reach set [d - 1, d + 1]^2 holds only the target's own cell.
  const auto tight = enabledActions(sys2(Matrix::Identity(2, 2), Matrix::Identity(2, 2), Vector::Zero(2)), p,
                                    centerTargets(p));
  CHECK(tight.enablingRegions()[static_cast<std::size_t>(center)] == std::vector<Index>{center});
  CHECK(tight.choiceCount() == 25);

  // [d - 1.5, d + 1.5]^2 covers the 3 x 3 neighbourhood.
  const auto wide = enabledActions(sys2(Matrix::Identity(2, 2), Matrix::Identity(2, 2), Vector::Zero(2), 1.5), p,
                                   centerTargets(p));
  std::vector<Index> expected;
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) expected.push_back(p.flatIndex(std::vector<int>{i, j}));
  CHECK(wide.enablingRegions()[static_cast<std::size_t>(center)] == expected);
  for (const auto& list : wide.enabled) {
    for (std::size_t i = 1; i < list.size(); ++i) CHECK(list[i - 1] < list[i]);
  }
  CHECK(wide.choiceCount() == 9 * 9 + 4 * 4 + 12 * 6);
}

TEST_CASE("degenerate input box enables nothing") {
  const auto s = sys2(Matrix::Identity(2, 2), Matrix::Identity(2, 2), Vector::Zero(2), 0.0);
  const Partition p(vec({0.0, 0.0}), vec({1.0, 1.0}), {3, 3});
  const auto acts = enabledActions(s, p, centerTargets(p));
  CHECK(acts.choiceCount() == 0);
  CHECK(acts.actionCount() == 9);
}

TEST_CASE("BAS 1-zone enabled pairs") {
  const Partition p(vec({19.1, 36.0}), vec({0.2, 0.2}), {19, 20});
  const auto acts = enabledActions(basSystem(), p, centerTargets(p));
  CHECK(acts.actionCount() == 380);
  MESSAGE("BAS 1-zone enabled pairs: " << acts.choiceCount());
  CHECK(acts.choiceCount() > 0);
  for (const auto& list : acts.enabled) CHECK_FALSE(list.empty());
  CHECK(static_cast<double>(acts.choiceCount()) / static_cast<double>(acts.actionCount()) >= 3.0);
}

TEST_CASE("enabled pairs are sound") {
  const auto s = basSystem();
  const Partition p(vec({19.1, 36.0}), vec({0.2, 0.2}), {19, 20});
  const auto acts = enabledActions(s, p, centerTargets(p));
  std::vector<std::pair<Index, Index>> pairs;
  for (Index r = 0; r < p.regionCount(); ++r)
    for (Index a : acts.enabled[static_cast<std::size_t>(r)]) pairs.emplace_back(r, a);
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<std::size_t> pick(0, pairs.size() - 1);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const ControlLaw law(s);
  for (int t = 0; t < 10000; ++t) {
    const auto [r, a] = pairs[pick(rng)];
    const Box b = p.regionBox(r);
    Vector x(2);
    for (int i = 0; i < 2; ++i) x(i) = b.lower(i) + U(rng) * (b.upper(i) - b.lower(i));
    const auto res = law(acts.targets[static_cast<std::size_t>(a)], x);
    REQUIRE(res.withinBounds);
    REQUIRE(s.inputBox.contains(res.u));
    REQUIRE((s.step(x, res.u) - acts.targets[static_cast<std::size_t>(a)]).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("enlarging the input box never disables an action") {
  const Partition p(vec({19.1, 36.0}), vec({0.2, 0.2}), {19, 20});
  auto small = basSystem();
  small.inputBox = Box{vec({16.0, -5.0}), vec({26.0, 5.0})};
  const auto a = enabledActions(small, p, centerTargets(p));
  const auto b = enabledActions(basSystem(), p, centerTargets(p));
  for (std::size_t r = 0; r < a.enabled.size(); ++r)
    CHECK(std::includes(b.enabled[r].begin(), b.enabled[r].end(), a.enabled[r].begin(), a.enabled[r].end()));
  CHECK(a.choiceCount() < b.choiceCount());
}

TEST_CASE("control law") {
  const auto id = sys2(Matrix::Identity(2, 2), Matrix::Identity(2, 2), Vector::Zero(2));
  const Vector x = vec({0.3, -0.2});
  CHECK(controlInput(id, x, x).u.isZero());
  const auto twice = sys2(Matrix::Identity(2, 2), 2.0 * Matrix::Identity(2, 2), Vector::Zero(2));
  const auto r = controlInput(twice, vec({1.0, -1.0}), Vector::Zero(2));
  CHECK(r.u.isApprox(vec({0.5, -0.5})));
  CHECK(r.withinBounds);
  const auto far = controlInput(id, vec({5.0, 0.0}), Vector::Zero(2));
  CHECK_FALSE(far.withinBounds);
  const auto edge = controlInput(id, vec({1.0 + 5e-10, 0.0}), Vector::Zero(2));
  CHECK(edge.withinBounds);
  CHECK(edge.u(0) == 1.0);
}

TEST_CASE("grouped UAV pseudoinverse residual") {
  Matrix A = Matrix::Zero(6, 6), B = Matrix::Zero(6, 3);
  for (int a = 0; a < 3; ++a) {
    A(2 * a, 2 * a) = A(2 * a + 1, 2 * a + 1) = A(2 * a, 2 * a + 1) = 1.0;
    B(2 * a, a) = 0.5;
    B(2 * a + 1, a) = 1.0;
  }
  const auto base = makeSystem(A, B, Vector::Zero(6), Box{Vector::Constant(3, -4.0), Vector::Constant(3, 4.0)});
  const auto g = groupSteps(base, 2);
  Vector d = Vector::Zero(6);
  d(0) = 1.0;
  const auto r = controlInput(g, d, Vector::Zero(6));
  CHECK((g.B * r.u - d).cwiseAbs().maxCoeff() < 1e-9);
}
