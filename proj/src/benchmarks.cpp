#include "pacimdp/benchmarks.hpp"

#include "pacimdp/linear_system.hpp"

namespace pacimdp {

namespace {

using nlohmann::json;

json bas1zone() {
  return json::parse(R"({
    "name": "bas1zone",
    "A": [[0.8820, 0.0058], [0.0134, 0.9625]],
    "B": [[0.0584, 0.0], [0.0, 0.0241]],
    "q": [0.9604, 1.3269],
    "input_lower": [14.0, -10.0],
    "input_upper": [28.0, 10.0],
    "partition": {"lower": [19.1, 36.0], "widths": [0.2, 0.2], "counts": [19, 20]},
    "goal": [{"lower": [20.9, 36.0], "upper": [21.1, 40.0]}],
    "horizon": 64,
    "threshold": 0.5,
    "initial_state": [20.0, 37.5],
    "noise": {"kind": "gaussian", "mean": [0.0, 0.0],
              "covariance": [[0.02, 0.0], [0.0, 0.1]], "seed": 1}
  })");
}

json bas2zone() {
  return json::parse(R"({
    "name": "bas2zone",
    "A": [[0.8425, 0.0537, -0.0084, 0.0],
          [0.0515, 0.8435, 0.0, -0.0064],
          [0.0668, 0.0, 0.8971, 0.0],
          [0.0, 0.0668, 0.0, 0.8971]],
    "B": [[0.0584, 0.0, 0.0, 0.0],
          [0.0, 0.0599, 0.0, 0.0],
          [0.0, 0.0, 0.0362, 0.0],
          [0.0, 0.0, 0.0, 0.0362]],
    "q": [1.2291, 1.0749, 0.0, 0.0],
    "input_lower": [14.0, 14.0, 65.0, 65.0],
    "input_upper": [26.0, 26.0, 85.0, 85.0],
    "partition": {"lower": [17.9, 17.9, 35.75, 35.75], "widths": [0.2, 0.2, 0.5, 0.5],
                  "counts": [21, 21, 9, 9]},
    "goal": [{"lower": [19.9, 19.9, 35.75, 35.75], "upper": [20.1, 20.1, 40.25, 40.25]}],
    "horizon": 32,
    "threshold": 0.5,
    "initial_state": [19.0, 21.0, 38.0, 38.0],
    "noise": {"kind": "gaussian", "mean": [0.0, 0.0, 0.0, 0.0],
              "covariance": [[0.01, 0.0, 0.0, 0.0], [0.0, 0.01, 0.0, 0.0],
                             [0.0, 0.0, 0.01, 0.0], [0.0, 0.0, 0.0, 0.01]], "seed": 1}
  })");
}

json diagonal(const std::vector<double>& d) {
  json m = json::array();
  for (std::size_t i = 0; i < d.size(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < d.size(); ++j) row.push_back(i == j ? d[i] : 0.0);
    m.push_back(row);
  }
  return m;
}

// Per-axis double integrator, stacked as (p1, v1, p2, v2, ...).
json uav(int axes) {
  const int n = 2 * axes;
  json A = json::array(), B = json::array();
  for (int i = 0; i < n; ++i) {
    json ra = json::array(), rb = json::array();
    for (int j = 0; j < n; ++j) ra.push_back(i == j ? 1.0 : (i % 2 == 0 && j == i + 1 ? 1.0 : 0.0));
    for (int j = 0; j < axes; ++j) rb.push_back(j == i / 2 ? (i % 2 == 0 ? 0.5 : 1.0) : 0.0);
    A.push_back(ra);
    B.push_back(rb);
  }

  const std::vector<double> posLower{-15.0, -9.0, -7.0};
  const std::vector<int> posCounts{15, 9, 7};
  const std::vector<double> goalLower{11.0, 1.0, -7.0}, goalUpper{15.0, 5.0, -3.0};
  const std::vector<double> start{-14.0, 6.0, -6.0};
  // Obstacles as {axis lower, axis upper} per position axis; velocity is free.
  const std::vector<std::vector<std::pair<double, double>>> obstacles{
      {{-9.0, -5.0}, {-9.0, 3.0}, {-7.0, 3.0}},
      {{-1.0, 3.0}, {-3.0, 9.0}, {-3.0, 7.0}},
      {{5.0, 9.0}, {-9.0, -1.0}, {-7.0, 7.0}},
      {{5.0, 9.0}, {5.0, 9.0}, {-7.0, 1.0}},
  };

  json lower = json::array(), widths = json::array(), counts = json::array();
  json gl = json::array(), gu = json::array(), x0 = json::array();
  json crit = json::array();
  for (int a = 0; a < axes; ++a) {
    lower.push_back(posLower[a]);
    lower.push_back(-3.0);
    widths.push_back(2.0);
    widths.push_back(2.0);
    counts.push_back(posCounts[a]);
    counts.push_back(3);
    gl.push_back(goalLower[a]);
    gl.push_back(-3.0);
    gu.push_back(goalUpper[a]);
    gu.push_back(3.0);
    x0.push_back(start[a]);
    x0.push_back(0.0);
  }
  for (const auto& ob : obstacles) {
    json lo = json::array(), hi = json::array();
    for (int a = 0; a < axes; ++a) {
      lo.push_back(ob[a].first);
      lo.push_back(-3.0);
      hi.push_back(ob[a].second);
      hi.push_back(3.0);
    }
    crit.push_back({{"lower", lo}, {"upper", hi}});
  }

  std::vector<double> zeros(static_cast<std::size_t>(n), 0.0);
  std::vector<double> calm(static_cast<std::size_t>(n)), gust(static_cast<std::size_t>(n));
  std::vector<double> calmStep(static_cast<std::size_t>(n)), gustStep(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const bool pos = i % 2 == 0;
    calmStep[i] = pos ? 0.01 : 0.02;
    gustStep[i] = pos ? 0.08 : 0.15;
    calm[i] = pos ? 0.05 : 0.04;
    gust[i] = pos ? 0.4 : 0.3;
  }
  auto mix = [&](const std::vector<double>& c, const std::vector<double>& g) {
    return json{{"kind", "mixture"},
                {"seed", 1},
                {"components",
                 {{{"weight", 0.85}, {"mean", zeros}, {"covariance", diagonal(c)}},
                  {{"weight", 0.15}, {"mean", zeros}, {"covariance", diagonal(g)}}}}};
  };

  json in = json::array(), ip = json::array();
  for (int a = 0; a < axes; ++a) {
    in.push_back(-4.0);
    ip.push_back(4.0);
  }
  return json{{"name", axes == 3 ? "uav6d" : "uav4d"},
              {"A", A},
              {"B", B},
              {"input_lower", in},
              {"input_upper", ip},
              {"group_steps", 2},
              {"partition", {{"lower", lower}, {"widths", widths}, {"counts", counts}}},
              {"goal", {{{"lower", gl}, {"upper", gu}}}},
              {"critical", crit},
              {"horizon", 32},
              {"threshold", 0.5},
              {"initial_state", x0},
              {"noise", mix(calm, gust)},
              {"step_noise", mix(calmStep, gustStep)}};
}

}  // namespace

std::map<std::string, nlohmann::json> benchmarkConfigs() {
  return {{"bas1zone", bas1zone()}, {"bas2zone", bas2zone()}, {"uav6d", uav(3)}, {"uav4d", uav(2)}};
}

nlohmann::json benchmarkConfig(const std::string& name) {
  auto all = benchmarkConfigs();
  auto it = all.find(name);
  if (it == all.end()) throw ModelError("unknown benchmark '" + name + "'");
  return it->second;
}

}  // namespace pacimdp
