#include "shrinkflow/trajectory_io.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "shrinkflow/mesh_io.hpp"

namespace shrinkflow {

using nlohmann::json;

void save_trajectory(const std::filesystem::path& dir, const FlowTrajectory& traj,
                     const std::string& config_json) {
  std::filesystem::create_directories(dir);
  json manifest;
  manifest["format"] = "shrinkflow-trajectory-1";
  manifest["times"] = traj.times;
  manifest["areas"] = traj.areas;
  manifest["t_explosion_estimate"] = traj.t_explosion_estimate;
  if (traj.maps.filled) {
    manifest["dilation"] = traj.maps.dilation;
    manifest["stretched_time"] = traj.maps.stretched_time;
  }
  if (!config_json.empty()) manifest["config"] = json::parse(config_json);
  std::vector<std::string> files;
  char name[64];
  for (int i = 0; i < traj.n_snapshots(); ++i) {
    std::snprintf(name, sizeof(name), "snapshot_%05d.off", i);
    files.emplace_back(name);
    write_off(dir / name, traj.snapshot(i));
  }
  manifest["snapshots"] = files;
  std::ofstream out(dir / "manifest.json");
  if (!out) fail(ErrorCode::IoError, "cannot write " + (dir / "manifest.json").string());
  out << manifest.dump(2) << "\n";
}

FlowTrajectory load_trajectory(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) fail(ErrorCode::IoError, "cannot open " + (dir / "manifest.json").string());
  json manifest;
  try {
    in >> manifest;
  } catch (const std::exception& e) {
    fail(ErrorCode::IoError, std::string("bad manifest: ") + e.what());
  }
  FlowTrajectory traj;
  traj.times = manifest.at("times").get<std::vector<double>>();
  traj.areas = manifest.at("areas").get<std::vector<double>>();
  traj.t_explosion_estimate = manifest.at("t_explosion_estimate").get<double>();
  const auto files = manifest.at("snapshots").get<std::vector<std::string>>();
  if (files.size() != traj.times.size())
    fail(ErrorCode::IoError, "manifest snapshot count mismatch");
  for (size_t i = 0; i < files.size(); ++i) {
    auto mesh = read_off(dir / files[i]);
    if (i == 0) traj.topology = mesh.topology_ptr();
    if (mesh.n_vertices() != traj.topology->n_vertices)
      fail(ErrorCode::IoError, "snapshot vertex count mismatch");
    traj.positions.push_back(mesh.positions());
  }
  if (manifest.contains("dilation")) {
    traj.maps.dilation = manifest["dilation"].get<std::vector<double>>();
    traj.maps.stretched_time = manifest["stretched_time"].get<std::vector<double>>();
    traj.maps.filled = true;
  }
  return traj;
}

}  // namespace shrinkflow
