#pragma once

#include <json.hpp>

#include <map>
#include <string>

namespace pacimdp {

/**
 * Ready-to-run model documents (see parseModel for the schema):
 *
 *   bas1zone  2-D building, 19 x 20 grid, K = 64
 *   bas2zone  4-D building, 21 x 21 x 9 x 9 grid, K = 32 (large)
 *   uav6d     3-axis double integrator, 2-step grouping, K = 32 (large)
 *   uav4d     planar (x, y) reduction of uav6d for desk-scale runs
 */
std::map<std::string, nlohmann::json> benchmarkConfigs();

/// Throws ModelError for an unknown name.
nlohmann::json benchmarkConfig(const std::string& name);

}  // namespace pacimdp
