#include "pacimdp/linear_system.hpp"

#include <doctest.h>

#include <random>

using namespace pacimdp;

namespace {

LinearSystem identity2() {
  return makeSystem(Matrix::Identity(2, 2), Matrix::Identity(2, 2), Vector::Zero(2),
                    Box{Vector::Constant(2, -1.0), Vector::Constant(2, 1.0)});
}

LinearSystem uavAxis() {
  Matrix A(2, 2), B(2, 1);
  A << 1, 1, 0, 1;
  B << 0.5, 1;
  return makeSystem(A, B, Vector::Zero(2), Box{Vector::Constant(1, -4.0), Vector::Constant(1, 4.0)});
}

LinearSystem randomSystem(std::mt19937_64& rng, int n, int p) {
  std::normal_distribution<double> N(0.0, 0.5);
  Matrix A = Matrix::Identity(n, n), B(n, p);
  Vector q(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) A(i, j) += N(rng) * 0.3;
    for (int j = 0; j < p; ++j) B(i, j) = N(rng);
    q(i) = N(rng);
  }
  return makeSystem(A, B, q, Box{Vector::Constant(p, -1.0), Vector::Constant(p, 1.0)});
}

}  // namespace

TEST_CASE("box membership and volume") {
  Box b{Vector::Constant(2, 0.0), Vector::Constant(2, 2.0)};
  CHECK(b.contains((Vector(2) << 2.0, 0.0).finished()));
  CHECK_FALSE(b.contains((Vector(2) << 2.1, 0.0).finished()));
  CHECK(b.contains((Vector(2) << 2.05, 0.0).finished(), 0.1));
  CHECK(b.volume() == doctest::Approx(4.0));
}

TEST_CASE("makeSystem rejects malformed input") {
  CHECK_THROWS_AS(makeSystem(Matrix::Identity(2, 3), Matrix::Identity(2, 2), Vector::Zero(2),
                             Box{Vector::Zero(2), Vector::Ones(2)}),
                  ModelError);
  CHECK_THROWS_AS(makeSystem(Matrix::Identity(2, 2), Matrix::Identity(2, 2), Vector::Zero(3),
                             Box{Vector::Zero(2), Vector::Ones(2)}),
                  ModelError);
  CHECK_THROWS_AS(makeSystem(Matrix::Identity(2, 2), Matrix::Identity(2, 2), Vector::Zero(2),
                             Box{Vector::Ones(2), Vector::Zero(2)}),
                  ModelError);
  Matrix bad = Matrix::Identity(2, 2);
  bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(makeSystem(bad, Matrix::Identity(2, 2), Vector::Zero(2), Box{Vector::Zero(2), Vector::Ones(2)}),
                  ModelError);
}

TEST_CASE("groupSteps identity case") {
  const auto g = groupSteps(identity2(), 2);
  CHECK(g.A.isApprox(Matrix::Identity(2, 2)));
  Matrix U(2, 4);
  U << 1, 0, 1, 0, 0, 1, 0, 1;
  CHECK(g.B.isApprox(U));
  CHECK(g.q.isZero());
  CHECK(g.stepsPerAbstractAction == 2);
  CHECK(g.inputBox.lower.size() == 4);
}

TEST_CASE("groupSteps on a UAV axis") {
  const auto g = groupSteps(uavAxis(), 2);
  Matrix A(2, 2), U(2, 2);
  A << 1, 2, 0, 1;
  U << 1.5, 0.5, 1, 1;
  CHECK((g.A - A).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((g.B - U).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(g.inputBox.lower.isApprox(Vector::Constant(2, -4.0)));
}

TEST_CASE("groupSteps with m = 1 returns the system unchanged") {
  const auto s = identity2();
  const auto g = groupSteps(s, 1);
  CHECK(g.A == s.A);
  CHECK(g.B == s.B);
  CHECK(g.q == s.q);
  CHECK(g.stepsPerAbstractAction == 1);
}

TEST_CASE("groupSteps errors") {
  CHECK_THROWS_AS(groupSteps(identity2(), 0), ModelError);
  Matrix B(3, 1);
  B << 0, 0, 1;
  const auto s = makeSystem(Matrix::Identity(3, 3), B, Vector::Zero(3), Box{Vector::Constant(1, -1.0), Vector::Ones(1)});
  CHECK_THROWS_AS(groupSteps(s, 2), ModelError);
}

TEST_CASE("groupSteps composes") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = randomSystem(rng, 3, 2);
    const auto direct = groupSteps(s, 6);
    const auto nested = groupSteps(groupSteps(s, 2), 3);
    CHECK((direct.A - nested.A).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((direct.B - nested.B).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((direct.q - nested.q).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(direct.stepsPerAbstractAction == nested.stepsPerAbstractAction);
  }
}

TEST_CASE("one grouped step equals m concrete steps") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = randomSystem(rng, 3, 2);
    const int m = 1 + trial % 4;
    const auto g = groupSteps(s, m);
    Vector x(3), u(2 * m);
    for (int i = 0; i < 3; ++i) x(i) = U(rng) * 5;
    for (int i = 0; i < 2 * m; ++i) u(i) = U(rng);
    Vector y = x;
    for (int i = 0; i < m; ++i) y = s.step(y, u.segment(2 * i, 2));
    CHECK((g.step(x, u) - y).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("input rank and validation report") {
  CHECK(inputRank(Matrix::Identity(4, 4)).rank == 4);
  const auto ok = validateSystem(makeSystem(Matrix::Identity(4, 4), Matrix::Identity(4, 4), Vector::Zero(4),
                                            Box{Vector::Constant(4, -1.0), Vector::Ones(4)}));
  CHECK(ok.ok());
  CHECK(ok.rankB == 4);

  const auto bad = validateSystem(uavAxis());
  CHECK_FALSE(bad.ok());
  CHECK(bad.rankB == 1);
  CHECK(bad.str().find("rank") != std::string::npos);

  Matrix A(2, 2), B(2, 2);
  A << 0.8820, 0.0058, 0.0134, 0.9625;
  B << 0.0584, 0, 0, 0.0241;
  const auto bas = validateSystem(makeSystem(A, B, Vector::Zero(2), Box{Vector::Zero(2), Vector::Ones(2)}));
  CHECK(bas.ok());
  CHECK(bas.rankB == 2);
  CHECK(bas.sigmaMinB == doctest::Approx(0.0241));

  const auto singular = validateSystem(makeSystem(Matrix::Zero(2, 2), Matrix::Identity(2, 2), Vector::Zero(2),
                                                  Box{Vector::Zero(2), Vector::Ones(2)}));
  CHECK_FALSE(singular.ok());
}

TEST_CASE("reach-avoid membership") {
  ReachAvoidSpec spec;
  spec.goal = {Box{Vector::Constant(1, 1.0), Vector::Constant(1, 2.0)}};
  spec.critical = {Box{Vector::Constant(1, -2.0), Vector::Constant(1, -1.0)}};
  CHECK(spec.inGoal(Vector::Constant(1, 1.5)));
  CHECK_FALSE(spec.inGoal(Vector::Constant(1, 0.5)));
  CHECK(spec.inCritical(Vector::Constant(1, -1.5)));
  CHECK_FALSE(spec.inCritical(Vector::Constant(1, 1.5)));
}
