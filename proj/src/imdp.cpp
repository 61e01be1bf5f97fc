#include "pacimdp/imdp.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace pacimdp {

namespace {

constexpr double kFeasibilityTolerance = 1e-9;

std::string formatProbability(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  std::string s(buf, end);
  if (s.find_first_of(".en") == std::string::npos) s += ".0";
  return s;
}

double parseDouble(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ModelError("malformed number '" + std::string(s) + "' in interchange file");
  return v;
}

std::vector<Index> sortedUnique(std::vector<Index> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

template <typename RowBuilder>
IntervalMdp assemble(const Partition& part, const ActionSet& actions, const SampleCounts& counts,
                     const ReachAvoidSpec& spec, RowBuilder&& makeRow) {
  if (static_cast<Index>(actions.enabled.size()) != part.regionCount())
    throw ModelError("action set does not match the partition");
  if (counts.perAction.size() != actions.targets.size())
    throw ModelError("sample counts do not match the action set");

  IntervalMdp mdp;
  mdp.numStates = part.regionCount() + 1;
  mdp.enabled.resize(static_cast<std::size_t>(mdp.numStates));
  const Index numActions = actions.actionCount();
  mdp.rows.resize(static_cast<std::size_t>(numActions) + 1);

  std::vector<char> used(static_cast<std::size_t>(numActions), 0);
  for (Index s = 0; s < part.regionCount(); ++s) {
    mdp.enabled[s] = actions.enabled[s];
    for (Index a : actions.enabled[s]) used[a] = 1;
  }
  for (Index a = 0; a < numActions; ++a) {
    if (used[a]) mdp.rows[a] = makeRow(counts.perAction[a]);
  }
  mdp.rows[numActions] = {Transition{mdp.absorbingState(), 1.0, 1.0}};
  mdp.enabled[mdp.absorbingState()] = {numActions};

  const LabelledRegions labels = labelRegions(part, spec);
  mdp.goalStates = labels.goal;
  mdp.criticalStates = labels.critical;
  mdp.initialState = spec.initialState.size() == part.dim() ? part.regionIndex(spec.initialState)
                                                             : mdp.absorbingState();
  mdp.sampleCount = counts.N;
  mdp.horizon = spec.horizon;
  mdp.validate();
  return mdp;
}

}  // namespace

Index IntervalMdp::choiceCount() const {
  Index total = 0;
  for (const auto& e : enabled) total += static_cast<Index>(e.size());
  return total;
}

Index IntervalMdp::transitionCount() const {
  Index total = 0;
  for (const auto& e : enabled) {
    for (Index a : e) total += static_cast<Index>(rows[a].size());
  }
  return total;
}

Index IntervalMdp::storedEntryCount() const {
  Index total = 0;
  for (const auto& r : rows) total += static_cast<Index>(r.size());
  return total;
}

void IntervalMdp::validate() const {
  if (numStates < 1 || static_cast<Index>(enabled.size()) != numStates || rows.empty())
    throw ModelError("interval MDP has inconsistent sizes");
  const Index deadlock = deadlockAction();
  if (enabled[absorbingState()] != std::vector<Index>{deadlock} ||
      rows[deadlock] != IntervalRow{Transition{absorbingState(), 1.0, 1.0}})
    throw ModelError("absorbing state must be a deadlock with a [1,1] self-loop");

  for (Index s = 0; s < numStates; ++s) {
    for (std::size_t i = 0; i < enabled[s].size(); ++i) {
      const Index a = enabled[s][i];
      if (a < 0 || a > deadlock) throw ModelError("enabled action id out of range");
      if (i > 0 && enabled[s][i - 1] >= a) throw ModelError("enabled actions must be ascending");
      if (a == deadlock && s != absorbingState())
        throw ModelError("only the absorbing state may use the deadlock action");
      if (rows[a].empty()) throw ModelError("enabled action has an empty row");
    }
  }
  for (Index a = 0; a < static_cast<Index>(rows.size()); ++a) {
    if (rows[a].empty()) continue;
    double lo = 0.0, hi = 0.0;
    for (std::size_t i = 0; i < rows[a].size(); ++i) {
      const auto& t = rows[a][i];
      if (t.successor < 0 || t.successor >= numStates)
        throw ModelError("row successor out of range");
      if (i > 0 && rows[a][i - 1].successor >= t.successor)
        throw ModelError("row successors must be ascending");
      if (!(0.0 <= t.lower && t.lower <= t.upper && t.upper <= 1.0 && t.upper > 0.0))
        throw ModelError("invalid probability interval");
      lo += t.lower;
      hi += t.upper;
    }
    if (lo > 1.0 + kFeasibilityTolerance || hi < 1.0 - kFeasibilityTolerance)
      throw ModelError("infeasible interval row for action " + std::to_string(a));
  }
  for (Index g : goalStates) {
    if (g < 0 || g >= absorbingState()) throw ModelError("goal state out of range");
    if (std::binary_search(criticalStates.begin(), criticalStates.end(), g))
      throw ModelError("goal and critical states overlap");
  }
  for (Index c : criticalStates) {
    if (c < 0 || c >= absorbingState()) throw ModelError("critical state out of range");
  }
}

LabelledRegions labelRegions(const Partition& part, const ReachAvoidSpec& spec) {
  LabelledRegions out;
  for (const auto& box : spec.goal) {
    auto r = part.regionsInBox(box);
    out.goal.insert(out.goal.end(), r.begin(), r.end());
  }
  for (const auto& box : spec.critical) {
    auto r = part.regionsInBox(box);
    out.critical.insert(out.critical.end(), r.begin(), r.end());
  }
  out.goal = sortedUnique(std::move(out.goal));
  out.critical = sortedUnique(std::move(out.critical));
  for (Index g : out.goal) {
    if (std::binary_search(out.critical.begin(), out.critical.end(), g))
      throw ModelError("goal and critical regions overlap");
  }
  return out;
}

IntervalMdp buildImdp(const Partition& part, const ActionSet& actions, const SampleCounts& counts,
                      const IntervalTable& table, const ReachAvoidSpec& spec) {
  if (table.sampleCount() != counts.N)
    throw ModelError("interval table was built for a different sample count");
  IntervalMdp mdp = assemble(part, actions, counts, spec, [&](const auto& perRegion) {
    IntervalRow row;
    row.reserve(perRegion.size());
    for (const auto& [region, nIn] : perRegion) {
      const auto& iv = table[counts.N - nIn];
      row.push_back({region, iv.lower, iv.upper});
    }
    return row;
  });
  mdp.beta = table.beta();
  return mdp;
}

IntervalMdp buildPointMdp(const Partition& part, const ActionSet& actions,
                          const SampleCounts& counts, const ReachAvoidSpec& spec) {
  return assemble(part, actions, counts, spec, [&](const auto& perRegion) {
    IntervalRow row;
    row.reserve(perRegion.size());
    for (const auto& [region, nIn] : perRegion) {
      const double p = static_cast<double>(nIn) / counts.N;
      row.push_back({region, p, p});
    }
    return row;
  });
}

void writeInterchange(const IntervalMdp& mdp, std::ostream& out) {
  out << "pacimdp-imdp 1\n";
  out << "states " << mdp.numStates << '\n';
  out << "actions " << mdp.actionCount() << '\n';
  out << "choices " << mdp.choiceCount() << '\n';
  out << "transitions " << mdp.transitionCount() << '\n';
  out << "initial " << mdp.initialState << '\n';
  out << "samples " << mdp.sampleCount << '\n';
  out << "beta " << formatProbability(mdp.beta) << '\n';
  out << "horizon " << mdp.horizon << '\n';
  out << "goal " << mdp.goalStates.size();
  for (Index g : mdp.goalStates) out << ' ' << g;
  out << "\ncritical " << mdp.criticalStates.size();
  for (Index c : mdp.criticalStates) out << ' ' << c;
  out << '\n';
  for (Index s = 0; s < mdp.numStates; ++s) {
    for (Index a : mdp.enabled[s]) {
      for (const auto& t : mdp.rows[a]) {
        out << s << ' ' << a << ' ' << t.successor << " [" << formatProbability(t.lower) << ','
            << formatProbability(t.upper) << "]\n";
      }
    }
  }
}

void exportInterchange(const IntervalMdp& mdp, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  writeInterchange(mdp, out);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

IntervalMdp readInterchange(std::istream& in) {
  auto expectKey = [&](const char* key) {
    std::string k;
    if (!(in >> k) || k != key)
      throw ModelError(std::string("interchange file: expected '") + key + "'");
  };
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "pacimdp-imdp" || version != 1) throw ModelError("not a pacimdp interchange file");

  IntervalMdp mdp;
  Index actions = 0, choices = 0, transitions = 0;
  std::string betaText;
  expectKey("states");
  in >> mdp.numStates;
  expectKey("actions");
  in >> actions;
  expectKey("choices");
  in >> choices;
  expectKey("transitions");
  in >> transitions;
  expectKey("initial");
  in >> mdp.initialState;
  expectKey("samples");
  in >> mdp.sampleCount;
  expectKey("beta");
  in >> betaText;
  mdp.beta = parseDouble(betaText);
  expectKey("horizon");
  in >> mdp.horizon;
  auto readList = [&](const char* key, std::vector<Index>& list) {
    expectKey(key);
    std::size_t n = 0;
    in >> n;
    list.resize(n);
    for (auto& v : list) in >> v;
  };
  readList("goal", mdp.goalStates);
  readList("critical", mdp.criticalStates);
  if (!in || mdp.numStates < 1 || actions < 0) throw ModelError("malformed interchange header");

  mdp.enabled.resize(static_cast<std::size_t>(mdp.numStates));
  mdp.rows.resize(static_cast<std::size_t>(actions) + 1);
  std::vector<char> rowDone(mdp.rows.size(), 0);
  // (state, action) of the row currently being read, and how much of an
  // already-known row has been matched.
  Index curState = -1, curAction = -1;
  std::size_t matched = 0;
  bool building = false;
  auto finishChoice = [&] {
    if (curAction < 0) return;
    if (building) rowDone[curAction] = 1;
    else if (matched != mdp.rows[curAction].size())
      throw ModelError("shared row differs between states");
  };

  Index s = 0, a = 0, succ = 0;
  std::string interval;
  while (in >> s >> a >> succ >> interval) {
    if (s < 0 || s >= mdp.numStates || a < 0 || a > actions)
      throw ModelError("interchange entry out of range");
    if (interval.size() < 5 || interval.front() != '[' || interval.back() != ']')
      throw ModelError("malformed interval '" + interval + "'");
    const auto comma = interval.find(',');
    if (comma == std::string::npos) throw ModelError("malformed interval '" + interval + "'");
    const Transition t{succ, parseDouble(std::string_view(interval).substr(1, comma - 1)),
                       parseDouble(std::string_view(interval).substr(
                           comma + 1, interval.size() - comma - 2))};
    if (s != curState || a != curAction) {
      finishChoice();
      curState = s;
      curAction = a;
      matched = 0;
      building = !rowDone[a];
      if (mdp.enabled[s].empty() || mdp.enabled[s].back() != a) mdp.enabled[s].push_back(a);
    }
    if (building) {
      mdp.rows[a].push_back(t);
    } else {
      if (matched >= mdp.rows[a].size() || !(mdp.rows[a][matched] == t))
        throw ModelError("shared row differs between states");
      ++matched;
    }
  }
  finishChoice();
  if (!in.eof()) throw ModelError("malformed interchange entry");
  mdp.validate();
  if (mdp.choiceCount() != choices || mdp.transitionCount() != transitions)
    throw ModelError("interchange header counts do not match the entries");
  return mdp;
}

IntervalMdp importInterchange(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return readInterchange(in);
}

ModelStats modelStats(const IntervalMdp& mdp) {
  return ModelStats{mdp.numStates, mdp.choiceCount(), mdp.choiceCountWithoutDeadlock(),
                    mdp.transitionCount(), mdp.storedEntryCount()};
}

}  // namespace pacimdp
