#include "pacimdp/imdp.hpp"
#include "pacimdp/noise.hpp"

#include <doctest.h>

#include <sstream>

using namespace pacimdp;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

struct Bas {
  LinearSystem sys;
  Partition part;
  ReachAvoidSpec spec;
  ActionSet actions;
  NoiseSource noise;
};

Bas bas() {
  Matrix A(2, 2), B(2, 2);
  A << 0.8820, 0.0058, 0.0134, 0.9625;
  B << 0.0584, 0, 0, 0.0241;
  auto sys = makeSystem(A, B, vec({0.9604, 1.3269}), Box{vec({14.0, -10.0}), vec({28.0, 10.0})});
  Partition part(vec({19.1, 36.0}), vec({0.2, 0.2}), {19, 20});
  ReachAvoidSpec spec;
  spec.goal = {Box{vec({20.9, 36.0}), vec({21.1, 40.0})}};
  spec.horizon = 64;
  spec.threshold = 0.5;
  spec.initialState = vec({20.0, 37.5});
  auto actions = enabledActions(sys, part, centerTargets(part));
  Matrix cov(2, 2);
  cov << 0.02, 0, 0, 0.1;
  return Bas{sys, part, spec, actions, NoiseSource::gaussian(Vector::Zero(2), cov, 1)};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("single region with every sample inside") {
  const Partition p(vec({-1.0}), vec({2.0}), {1});
  ActionSet acts;
  acts.targets = {vec({0.0})};
  acts.enabled = {{0}};
  SampleCounts c;
  c.N = 50;
  c.perAction = {{{0, 50}}};
  ReachAvoidSpec spec;
  spec.goal = {};
  spec.horizon = 3;
  spec.initialState = vec({0.0});
  const IntervalTable t(50, 0.01);
  const auto mdp = buildImdp(p, acts, c, t, spec);
  REQUIRE(mdp.rows[0].size() == 1);
  CHECK(mdp.rows[0][0].successor == 0);
  CHECK(mdp.rows[0][0].lower == t[0].lower);
  CHECK(mdp.rows[0][0].upper == 1.0);
  CHECK(mdp.numStates == 2);
  CHECK(mdp.enabled[1] == std::vector<Index>{1});
  CHECK(mdp.rows[1] == IntervalRow{{1, 1.0, 1.0}});
}

TEST_CASE("reference counts give the reference intervals") {
  const Partition p(vec({-1.5}), vec({1.0}), {3});
  ActionSet acts;
  acts.targets = {vec({0.0})};
  acts.enabled = {{0}, {0}, {0}};
  SampleCounts c;
  c.N = 100;
  c.perAction = {{{0, 34}, {1, 18}, {2, 42}, {3, 6}}};
  ReachAvoidSpec spec;
  spec.horizon = 1;
  spec.initialState = vec({0.0});
  const auto mdp = buildImdp(p, acts, c, IntervalTable(100, 0.01), spec);
  const auto& row = mdp.rows[0];
  REQUIRE(row.size() == 4);
  const double expected[3][2] = {{0.174, 0.538}, {0.063, 0.363}, {0.239, 0.617}};
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(row[i].lower - expected[i][0]) <= 0.001);
    CHECK(std::abs(row[i].upper - expected[i][1]) <= 0.001);
  }
  CHECK(row[3].successor == 3);
  mdp.validate();
  CHECK(mdp.choiceCount() == 4);
  CHECK(mdp.transitionCount() == 13);
  CHECK(mdp.storedEntryCount() == 5);
}

TEST_CASE("BAS 1-zone model size at N = 25") {
  auto b = bas();
  const auto samples = drawAbstractionSamples(b.noise, 25);
  const auto counts = countSamples(b.part, b.actions.targets, samples);
  const auto mdp = buildImdp(b.part, b.actions, counts, IntervalTable(25, 0.01), b.spec);
  mdp.validate();
  CHECK(mdp.numStates == 381);
  MESSAGE("choices " << mdp.choiceCount() << " (without deadlock " << mdp.choiceCountWithoutDeadlock()
                     << "), transitions " << mdp.transitionCount());
  CHECK(std::abs(mdp.transitionCount() - 20494.0) <= 0.15 * 20494.0);
  CHECK(mdp.storedEntryCount() < mdp.transitionCount());
  Index stored = 0;
  for (const auto& r : mdp.rows) stored += static_cast<Index>(r.size());
  CHECK(mdp.storedEntryCount() == stored);
  CHECK(mdp.goalStates.size() == 20);
  CHECK(mdp.initialState == b.part.regionIndex(b.spec.initialState));

  SUBCASE("rebuilding is identical") {
    const auto again = buildImdp(b.part, b.actions, countSamples(b.part, b.actions.targets, samples),
                                 IntervalTable(25, 0.01), b.spec);
    CHECK(again == mdp);
  }
  SUBCASE("interchange round trip") {
    std::stringstream ss;
    writeInterchange(mdp, ss);
    const auto back = readInterchange(ss);
    CHECK(back == mdp);
  }
  SUBCASE("point MDP has the same structure") {
    const auto point = buildPointMdp(b.part, b.actions, counts, b.spec);
    point.validate();
    CHECK(point.transitionCount() == mdp.transitionCount());
    for (const auto& row : point.rows)
      for (const auto& t : row) CHECK(t.lower == t.upper);
  }
}

TEST_CASE("deadlock-only interchange") {
  IntervalMdp mdp;
  mdp.numStates = 1;
  mdp.enabled = {{0}};
  mdp.rows = {{{0, 1.0, 1.0}}};
  mdp.validate();
  std::ostringstream out;
  writeInterchange(mdp, out);
  const auto ls = lines(out.str());
  CHECK(ls.front() == "pacimdp-imdp 1");
  CHECK(ls[1] == "states 1");
  CHECK(ls.back() == "0 0 0 [1.0,1.0]");
  int entries = 0;
  for (const auto& l : ls) entries += l.find('[') != std::string::npos;
  CHECK(entries == 1);
}

TEST_CASE("two-state interchange is byte stable") {
  IntervalMdp mdp;
  mdp.numStates = 2;
  mdp.enabled = {{0}, {1}};
  mdp.rows = {{{0, 0.2, 0.6}, {1, 0.4, 0.8}}, {{1, 1.0, 1.0}}};
  mdp.horizon = 4;
  mdp.validate();
  std::ostringstream a, b;
  writeInterchange(mdp, a);
  writeInterchange(mdp, b);
  CHECK(a.str() == b.str());
  int entries = 0;
  for (const auto& l : lines(a.str())) entries += l.find('[') != std::string::npos;
  CHECK(entries == 3);
  CHECK(a.str().find("0 0 0 [0.2,0.6]") != std::string::npos);
  std::istringstream in(a.str());
  CHECK(readInterchange(in) == mdp);
}

TEST_CASE("malformed interchange input") {
  std::istringstream bad("pacimdp-imdp 2\n");
  CHECK_THROWS_AS(readInterchange(bad), ModelError);
  std::istringstream truncated("pacimdp-imdp 1\nstates 1\n");
  CHECK_THROWS_AS(readInterchange(truncated), ModelError);
}

TEST_CASE("structural validation") {
  IntervalMdp mdp;
  mdp.numStates = 2;
  mdp.enabled = {{0}, {1}};
  mdp.rows = {{{0, 0.1, 0.3}, {1, 0.1, 0.3}}, {{1, 1.0, 1.0}}};
  CHECK_THROWS_AS(mdp.validate(), ModelError);
  mdp.rows[0] = {{1, 0.5, 1.0}, {0, 0.0, 0.5}};
  CHECK_THROWS_AS(mdp.validate(), ModelError);
  mdp.rows[0] = {{0, 0.0, 0.5}, {1, 0.5, 1.0}};
  mdp.validate();
  mdp.enabled[1] = {0};
  CHECK_THROWS_AS(mdp.validate(), ModelError);
}

TEST_CASE("labelling") {
  const Partition p(vec({0.0, 0.0}), vec({1.0, 1.0}), {4, 4});
  ReachAvoidSpec spec;
  spec.goal = {Box{vec({3.0, 3.0}), vec({4.0, 4.0})}};
  spec.critical = {Box{vec({1.0, 0.0}), vec({2.0, 2.0})}};
  const auto l = labelRegions(p, spec);
  CHECK(l.goal == std::vector<Index>{15});
  CHECK(l.critical == std::vector<Index>{4, 5});
  spec.critical.push_back(Box{vec({2.0, 2.0}), vec({4.0, 4.0})});
  CHECK_THROWS_AS(labelRegions(p, spec), ModelError);
  spec.critical = {Box{vec({0.5, 0.0}), vec({2.0, 2.0})}};
  CHECK_THROWS_AS(labelRegions(p, spec), ModelError);
}

TEST_CASE("model statistics") {
  IntervalMdp mdp;
  mdp.numStates = 2;
  mdp.enabled = {{0}, {1}};
  mdp.rows = {{{0, 0.2, 0.6}, {1, 0.4, 0.8}}, {{1, 1.0, 1.0}}};
  const auto s = modelStats(mdp);
  CHECK(s.states == 2);
  CHECK(s.choices == 2);
  CHECK(s.choicesWithoutDeadlock == 1);
  CHECK(s.transitions == 3);
  CHECK(s.storedEntries == 3);
}
