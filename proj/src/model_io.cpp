#include "pacimdp/model_io.hpp"

#include <fstream>

namespace pacimdp {

namespace {

using nlohmann::json;

const json& field(const json& doc, const char* key) {
  if (!doc.contains(key)) throw ModelError(std::string("model file: missing field '") + key + "'");
  return doc.at(key);
}

Vector toVector(const json& j, const char* what) {
  if (!j.is_array()) throw ModelError(std::string("model file: '") + what + "' must be an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ModelError(std::string("model file: '") + what + "' must hold numbers");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

Matrix toMatrix(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw ModelError(std::string("model file: '") + what + "' must be a nonempty matrix");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Vector row = toVector(j[r], what);
    if (row.size() != cols) throw ModelError(std::string("model file: ragged matrix '") + what + "'");
    m.row(r) = row.transpose();
  }
  return m;
}

Box toBox(const json& j, const char* what) {
  Box b{toVector(field(j, "lower"), what), toVector(field(j, "upper"), what)};
  if (b.lower.size() != b.upper.size()) throw ModelError(std::string("model file: box '") + what + "' has mismatched bounds");
  if (((b.upper - b.lower).array() < 0.0).any()) throw ModelError(std::string("model file: box '") + what + "' is empty");
  return b;
}

std::vector<Box> toBoxes(const json& doc, const char* key) {
  std::vector<Box> out;
  if (!doc.contains(key)) return out;
  for (const auto& b : doc.at(key)) out.push_back(toBox(b, key));
  return out;
}

}  // namespace

NoiseSource parseNoise(const json& doc, const std::filesystem::path& baseDir) {
  const std::string kind = field(doc, "kind").get<std::string>();
  const auto seed = field(doc, "seed").get<std::uint64_t>();
  if (kind == "gaussian")
    return NoiseSource::gaussian(toVector(field(doc, "mean"), "mean"),
                                 toMatrix(field(doc, "covariance"), "covariance"), seed);
  if (kind == "uniform") return NoiseSource::uniform(toBox(doc, "noise"), seed);
  if (kind == "mixture") {
    std::vector<NoiseSource::Component> comps;
    for (const auto& c : field(doc, "components")) {
      comps.push_back({field(c, "weight").get<double>(), toVector(field(c, "mean"), "mean"),
                       toMatrix(field(c, "covariance"), "covariance")});
    }
    return NoiseSource::mixture(std::move(comps), seed);
  }
  if (kind == "file") {
    std::filesystem::path p = field(doc, "path").get<std::string>();
    if (p.is_relative()) p = baseDir / p;
    return NoiseSource::pool(NoiseSource::readSampleFile(p), seed);
  }
  throw ModelError("model file: unknown noise kind '" + kind + "'");
}

Model parseModel(const json& doc, const std::filesystem::path& baseDir) {
  try {
    const Matrix A = toMatrix(field(doc, "A"), "A");
    const Matrix B = toMatrix(field(doc, "B"), "B");
    const Vector q = doc.contains("q") ? toVector(doc.at("q"), "q") : Vector::Zero(A.rows());
    LinearSystem base = makeSystem(A, B, q,
                                   Box{toVector(field(doc, "input_lower"), "input_lower"),
                                       toVector(field(doc, "input_upper"), "input_upper")});
    const int group = doc.value("group_steps", 1);
    LinearSystem system = groupSteps(base, group);

    const json& pj = field(doc, "partition");
    const Vector widths = toVector(field(pj, "widths"), "widths");
    const auto counts = field(pj, "counts").get<std::vector<int>>();
    Vector lower;
    if (pj.contains("lower")) {
      lower = toVector(pj.at("lower"), "lower");
    } else {
      const Vector center = toVector(field(pj, "center"), "center");
      if (center.size() != widths.size() || counts.size() != static_cast<std::size_t>(widths.size()))
        throw ModelError("model file: partition dimensions differ");
      Vector span(widths.size());
      for (Eigen::Index d = 0; d < widths.size(); ++d) span(d) = widths(d) * counts[d];
      lower = center - 0.5 * span;
    }
    Partition part(lower, widths, counts);
    if (part.dim() != system.stateDim()) throw ModelError("model file: partition and system dimensions differ");

    ReachAvoidSpec spec;
    spec.goal = toBoxes(doc, "goal");
    spec.critical = toBoxes(doc, "critical");
    spec.horizon = field(doc, "horizon").get<int>();
    spec.threshold = field(doc, "threshold").get<double>();
    spec.initialState = toVector(field(doc, "initial_state"), "initial_state");
    if (spec.horizon < 1) throw ModelError("model file: horizon must be positive");
    if (!(spec.threshold >= 0.0 && spec.threshold <= 1.0)) throw ModelError("model file: threshold must lie in [0, 1]");
    if (spec.initialState.size() != part.dim()) throw ModelError("model file: initial state dimension mismatch");
    if (spec.goal.empty()) throw ModelError("model file: at least one goal box is required");
    for (const auto& b : spec.goal)
      if (b.dim() != part.dim()) throw ModelError("model file: goal box dimension mismatch");
    for (const auto& b : spec.critical)
      if (b.dim() != part.dim()) throw ModelError("model file: critical box dimension mismatch");

    NoiseSource noise = parseNoise(field(doc, "noise"), baseDir);
    if (noise.dim() != part.dim()) throw ModelError("model file: noise dimension mismatch");
    std::optional<NoiseSource> stepNoise;
    if (doc.contains("step_noise")) {
      stepNoise = parseNoise(doc.at("step_noise"), baseDir);
      if (stepNoise->dim() != part.dim()) throw ModelError("model file: step noise dimension mismatch");
    }

    return Model{doc.value("name", std::string("model")), std::move(base), std::move(system), group,
                 std::move(part), std::move(spec), std::move(noise), std::move(stepNoise), doc};
  } catch (const json::exception& e) {
    throw ModelError(std::string("model file: ") + e.what());
  }
}

Model loadModel(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot read model file " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ModelError("model file " + path.string() + ": " + e.what());
  }
  return parseModel(doc, path.parent_path());
}

}  // namespace pacimdp
