#pragma once

#include "pacimdp/linear_system.hpp"
#include "pacimdp/noise.hpp"
#include "pacimdp/partition.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>

namespace pacimdp {

/**
 * A complete problem: dynamics, grid, reach-avoid objective and noise.
 *
 * `base` is the per-step system from the file; `system` is the system the
 * abstraction works on (base grouped by group_steps). `noise` must produce
 * samples at the abstraction's step resolution; `stepNoise`, when present,
 * produces per-step samples for concrete simulation of grouped models.
 */
struct Model {
  std::string name;
  LinearSystem base;
  LinearSystem system;
  int groupSteps = 1;
  Partition partition;
  ReachAvoidSpec spec;
  NoiseSource noise;
  std::optional<NoiseSource> stepNoise;
  nlohmann::json source;  ///< the parsed document, for manifests
};

/**
 * Model file schema (JSON):
 *
 *   name            string
 *   A, B            row-major nested arrays (n x n, n x p)
 *   q               n-vector, optional (default 0)
 *   input_lower     p-vector
 *   input_upper     p-vector
 *   group_steps     positive integer, optional (default 1)
 *   partition       {lower: n-vector, widths: n-vector, counts: n integers}
 *                   or {center, widths, counts}
 *   goal, critical  arrays of {lower, upper}; critical optional
 *   horizon         abstract steps
 *   threshold       eta in [0, 1]
 *   initial_state   n-vector
 *   noise           {kind: gaussian, mean, covariance, seed}
 *                 | {kind: uniform, lower, upper, seed}
 *                 | {kind: mixture, components: [{weight, mean, covariance}], seed}
 *                 | {kind: file, path, seed}       (path relative to the file)
 *   step_noise      optional, same forms, per concrete step
 *
 * Throws ModelError on schema violations.
 */
Model parseModel(const nlohmann::json& doc, const std::filesystem::path& baseDir = {});
Model loadModel(const std::filesystem::path& path);

NoiseSource parseNoise(const nlohmann::json& doc, const std::filesystem::path& baseDir = {});

}  // namespace pacimdp
