#pragma once

#include <filesystem>
#include <string>

#include "shrinkflow/flow.hpp"

namespace shrinkflow {

/// Writes dir/manifest.json (times, areas, clock tables, collapse estimate,
/// provenance config) plus one OFF file per snapshot.
void save_trajectory(const std::filesystem::path& dir, const FlowTrajectory& traj,
                     const std::string& config_json);

FlowTrajectory load_trajectory(const std::filesystem::path& dir);

}  // namespace shrinkflow
