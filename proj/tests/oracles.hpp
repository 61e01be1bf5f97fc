#pragma once

// Independent reference implementations used only by the tests.

#include "pacimdp/checker.hpp"
#include "pacimdp/imdp.hpp"
#include "pacimdp/partition.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

namespace oracle {

using pacimdp::Index;
using pacimdp::IntervalMdp;
using pacimdp::Transition;
using pacimdp::Vector;

// Smallest scale at which the point lies in the rectangle scaled about its center.
inline double enclosingScale(const pacimdp::Polytope& rect, const Vector& x) {
  const Vector& h = *rect.center;
  double lambda = 0.0;
  for (Eigen::Index i = 0; i < rect.M.rows(); ++i) {
    const double slack = rect.b(i) - rect.M.row(i).dot(h);
    lambda = std::max(lambda, (rect.M.row(i).dot(x) - rect.M.row(i).dot(h)) / slack);
  }
  return lambda;
}

// Scenario program with |Q| discarded samples on a rectangle: the optimum is
// the (Q+1)-th largest enclosing scale.
inline double scenarioProgram(const pacimdp::Polytope& rect, const std::vector<Vector>& points, int Q) {
  if (Q < 0 || Q >= static_cast<int>(points.size())) throw std::invalid_argument("discard count out of range");
  std::vector<double> lambdas;
  for (const auto& p : points) lambdas.push_back(enclosingScale(rect, p));
  std::sort(lambdas.begin(), lambdas.end(), std::greater<>());
  return lambdas[static_cast<std::size_t>(Q)];
}

// Exact LP min of sum_i p_i v_i over lower <= p <= upper, sum p = 1, by
// enumerating basic solutions: all but one coordinate at a bound.
inline double lpInnerMin(const std::vector<Transition>& row, const std::vector<double>& values) {
  const std::size_t m = row.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t free = 0; free < m; ++free) {
    const std::uint32_t masks = 1u << (m - 1);
    for (std::uint32_t mask = 0; mask < masks; ++mask) {
      double mass = 0.0, value = 0.0;
      std::size_t bit = 0;
      for (std::size_t i = 0; i < m; ++i) {
        if (i == free) continue;
        const double p = (mask >> bit++) & 1u ? row[i].upper : row[i].lower;
        mass += p;
        value += p * values[i];
      }
      const double pf = 1.0 - mass;
      if (pf < row[free].lower - 1e-12 || pf > row[free].upper + 1e-12) continue;
      best = std::min(best, value + pf * values[free]);
    }
  }
  if (!std::isfinite(best)) throw std::runtime_error("infeasible row");
  return best;
}

// Backward induction with an LP at every (state, action) backup.
inline std::vector<double> lpValueIteration(const IntervalMdp& mdp, int horizon) {
  const auto S = static_cast<std::size_t>(mdp.numStates);
  std::vector<char> goal(S, 0), dead(S, 0);
  for (Index g : mdp.goalStates) goal[static_cast<std::size_t>(g)] = 1;
  for (Index c : mdp.criticalStates) dead[static_cast<std::size_t>(c)] = 1;
  dead[static_cast<std::size_t>(mdp.absorbingState())] = 1;
  std::vector<double> v(S, 0.0);
  for (std::size_t s = 0; s < S; ++s) v[s] = goal[s] ? 1.0 : 0.0;
  for (int k = horizon - 1; k >= 0; --k) {
    std::vector<double> next(S, 0.0);
    for (std::size_t s = 0; s < S; ++s) {
      if (goal[s]) {
        next[s] = 1.0;
        continue;
      }
      if (dead[s]) continue;
      double best = 0.0;
      for (Index a : mdp.enabled[s]) {
        const auto& row = mdp.rows[static_cast<std::size_t>(a)];
        std::vector<double> vals;
        for (const auto& t : row) vals.push_back(v[static_cast<std::size_t>(t.successor)]);
        best = std::max(best, lpInnerMin(row, vals));
      }
      next[s] = best;
    }
    v = std::move(next);
  }
  return v;
}

// Classical finite-horizon MDP value iteration on point probabilities
// (uses each transition's lower bound as its probability).
inline std::vector<double> classicalValueIteration(const IntervalMdp& mdp, int horizon) {
  const auto S = static_cast<std::size_t>(mdp.numStates);
  std::vector<char> goal(S, 0), dead(S, 0);
  for (Index g : mdp.goalStates) goal[static_cast<std::size_t>(g)] = 1;
  for (Index c : mdp.criticalStates) dead[static_cast<std::size_t>(c)] = 1;
  dead[static_cast<std::size_t>(mdp.absorbingState())] = 1;
  std::vector<double> v(S, 0.0);
  for (std::size_t s = 0; s < S; ++s) v[s] = goal[s] ? 1.0 : 0.0;
  for (int k = horizon - 1; k >= 0; --k) {
    std::vector<double> next(S, 0.0);
    for (std::size_t s = 0; s < S; ++s) {
      if (goal[s]) {
        next[s] = 1.0;
        continue;
      }
      if (dead[s]) continue;
      double best = 0.0;
      for (Index a : mdp.enabled[s]) {
        double e = 0.0;
        for (const auto& t : mdp.rows[static_cast<std::size_t>(a)]) e += t.lower * v[static_cast<std::size_t>(t.successor)];
        best = std::max(best, e);
      }
      next[s] = best;
    }
    v = std::move(next);
  }
  return v;
}

// Random feasible interval row with m successors around a random distribution.
inline std::vector<Transition> randomRow(std::mt19937_64& rng, int m, Index firstSuccessor = 0) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<double> p(static_cast<std::size_t>(m));
  double sum = 0.0;
  for (auto& x : p) sum += (x = U(rng) + 1e-3);
  std::vector<Transition> row;
  for (int i = 0; i < m; ++i) {
    const double c = p[static_cast<std::size_t>(i)] / sum;
    const double lo = std::max(0.0, c - 0.3 * U(rng));
    const double hi = std::min(1.0, c + 0.3 * U(rng));
    row.push_back({firstSuccessor + i, lo, hi});
  }
  return row;
}

// Random iMDP: the last state is absorbing, the one before it is the goal.
inline IntervalMdp randomImdp(std::mt19937_64& rng, int states, int actions, int horizon) {
  IntervalMdp mdp;
  mdp.numStates = states;
  mdp.horizon = horizon;
  mdp.goalStates = {states - 2};
  mdp.initialState = 0;
  std::uniform_int_distribution<int> width(1, std::min(states, 4));
  std::bernoulli_distribution on(0.6);
  for (int a = 0; a < actions; ++a) {
    const int m = width(rng);
    std::vector<Index> succ(static_cast<std::size_t>(states));
    for (int s = 0; s < states; ++s) succ[static_cast<std::size_t>(s)] = s;
    std::shuffle(succ.begin(), succ.end(), rng);
    succ.resize(static_cast<std::size_t>(m));
    std::sort(succ.begin(), succ.end());
    auto row = randomRow(rng, m);
    for (int i = 0; i < m; ++i) row[static_cast<std::size_t>(i)].successor = succ[static_cast<std::size_t>(i)];
    mdp.rows.push_back(row);
  }
  mdp.rows.push_back({{states - 1, 1.0, 1.0}});
  mdp.enabled.resize(static_cast<std::size_t>(states));
  for (int s = 0; s < states - 1; ++s) {
    if (s == states - 2) continue;
    for (int a = 0; a < actions; ++a)
      if (on(rng)) mdp.enabled[static_cast<std::size_t>(s)].push_back(a);
  }
  mdp.enabled.back() = {actions};
  return mdp;
}

}  // namespace oracle
