#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "fwr/hierarchy.hpp"
#include "fwr/qmatrix.hpp"
#include "fwr/reflect_sde.hpp"

namespace fwr {

using Json = nlohmann::json;

/// Reads a .json or .toml configuration file (by extension).
Json load_config(const std::string& path);

/// Minimal TOML reader covering the configuration dialect used here:
/// [table.subtable] headers, key = value with strings, numbers, booleans
/// and flat arrays, full-line and trailing # comments.
Json parse_toml_subset(const std::string& text);

/// Writes via a temporary file in the same directory plus rename, so a
/// crash never leaves a half-written artifact.
void atomic_write(const std::string& path, const std::string& content);

/// CSV columns: t, x_1..x_d, xi, on_boundary. %.17g formatting keeps
/// reruns with the same seed byte-identical.
std::string trajectory_csv(const ReflectedTrajectory& traj);

Json matrix_to_json(const QuasipotentialMatrix& m);
QuasipotentialMatrix matrix_from_json(const Json& j);

Json tree_to_json(const CycleNode& node, const std::vector<std::string>& labels);
Json profile_to_json(const MetastableProfile& p, const std::vector<std::string>& labels);

}  // namespace fwr
