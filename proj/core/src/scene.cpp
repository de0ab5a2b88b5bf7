#include "binpick/scene.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

namespace binpick {

size_t VoxelGrid::occupied_count() const {
  return size_t(std::count(occupancy.begin(), occupancy.end(), true));
}

std::vector<Vec3> depth_to_points(const DepthImage& depth, const CameraIntrinsics& k,
                                  const Pose& camera_pose) {
  k.validate();
  std::vector<Vec3> out;
  out.reserve(depth.valid_count());
  for (int v = 0; v < depth.height; ++v)
    for (int u = 0; u < depth.width; ++u) {
      const double z = depth.at(u, v);
      if (z <= 0.0) continue;
      out.push_back(camera_pose * k.backproject(u + 0.5, v + 0.5, z));
    }
  return out;
}

VoxelGrid classify_and_carve(std::span<const Vec3> points, std::span<const PosedMesh> targets,
                             std::span<const PosedMesh> statics, const CarveConfig& config,
                             const VoxelGrid& grid_spec) {
  VoxelGrid grid(grid_spec.origin, grid_spec.resolution, grid_spec.dims);

  std::vector<Pose> target_inv, static_inv;
  for (const auto& m : targets) target_inv.push_back(m.pose.inverse());
  for (const auto& m : statics) static_inv.push_back(m.pose.inverse());

  // The capped query clamps to the cap, so query with headroom and compare
  // against the true tolerance.
  const double cap = 1.5 * config.assoc_tolerance;
  auto explained = [&](const Vec3& p) {
    for (size_t i = 0; i < targets.size(); ++i)
      if (targets[i].bvh->distance(target_inv[i] * p, cap) <= config.assoc_tolerance) return true;
    for (size_t i = 0; i < statics.size(); ++i)
      if (statics[i].bvh->distance(static_inv[i] * p, cap) <= config.assoc_tolerance) return true;
    return false;
  };

  std::unordered_map<size_t, int> counts;
  for (const Vec3& p : points) {
    const Eigen::Vector3i c = grid.cell_of(p);
    if (!grid.in_bounds(c)) continue;
    if (explained(p)) continue;
    const size_t idx = grid.index(c.x(), c.y(), c.z());
    if (++counts[idx] >= config.min_points_per_voxel) grid.occupancy[idx] = true;
  }
  return grid;
}

namespace {

template <typename Visit>
void for_overlapped_voxels(const VoxelGrid& grid, const Bvh& mesh, const Pose& pose,
                           Visit&& visit) {
  if (mesh.empty() || grid.occupancy.empty()) return;
  const TriangleMesh& m = mesh.mesh();
  for (size_t ti = 0; ti < m.triangle_count(); ++ti) {
    auto tri = m.triangle(ti);
    for (auto& v : tri) v = pose * v;
    Aabb tb;
    for (const auto& v : tri) tb.expand(v);
    Eigen::Vector3i lo = grid.cell_of(tb.lo).cwiseMax(Eigen::Vector3i::Zero());
    Eigen::Vector3i hi = grid.cell_of(tb.hi).cwiseMin(grid.dims - Eigen::Vector3i::Ones());
    for (int z = lo.z(); z <= hi.z(); ++z)
      for (int y = lo.y(); y <= hi.y(); ++y)
        for (int x = lo.x(); x <= hi.x(); ++x) {
          const size_t idx = grid.index(x, y, z);
          if (!grid.occupancy[idx]) continue;
          const Aabb cb = grid.cell_aabb({x, y, z});
          if (triangle_box_overlap(cb.center(), 0.5 * cb.extents(), tri)) {
            if (!visit(idx)) return;
          }
        }
  }
}

}  // namespace

bool voxels_collide(const VoxelGrid& grid, const Bvh& mesh, const Pose& pose) {
  bool hit = false;
  for_overlapped_voxels(grid, mesh, pose, [&](size_t) {
    hit = true;
    return false;  // stop
  });
  return hit;
}

size_t voxel_overlap_count(const VoxelGrid& grid, const Bvh& mesh, const Pose& pose, size_t cap) {
  std::unordered_set<size_t> seen;
  for_overlapped_voxels(grid, mesh, pose, [&](size_t idx) {
    seen.insert(idx);
    return seen.size() < cap;
  });
  return seen.size();
}

void dump_voxel_grid(const VoxelGrid& grid, const std::string& path_stem) {
  nlohmann::ordered_json header;
  header["origin"] = {grid.origin.x(), grid.origin.y(), grid.origin.z()};
  header["resolution"] = grid.resolution;
  header["dims"] = {grid.dims.x(), grid.dims.y(), grid.dims.z()};
  std::ofstream jh(path_stem + ".json");
  if (!jh) throw std::runtime_error("cannot write " + path_stem + ".json");
  jh << header.dump(2) << '\n';

  // run-length encoding: alternating (empty, occupied) run lengths as u32
  std::ofstream out(path_stem + ".bin", std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path_stem + ".bin");
  bool cur = false;
  uint32_t run = 0;
  auto flush = [&]() {
    out.write(reinterpret_cast<const char*>(&run), 4);
    run = 0;
  };
  for (bool b : grid.occupancy) {
    if (b != cur) {
      flush();
      cur = b;
    }
    ++run;
  }
  flush();
}

VoxelGrid load_voxel_grid(const std::string& path_stem) {
  std::ifstream jh(path_stem + ".json");
  if (!jh) throw std::runtime_error("cannot read " + path_stem + ".json");
  nlohmann::json header = nlohmann::json::parse(jh);
  VoxelGrid grid(Vec3(header["origin"][0], header["origin"][1], header["origin"][2]),
                 header["resolution"],
                 Eigen::Vector3i(header["dims"][0], header["dims"][1], header["dims"][2]));
  std::ifstream in(path_stem + ".bin", std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path_stem + ".bin");
  size_t pos = 0;
  bool cur = false;
  uint32_t run;
  while (in.read(reinterpret_cast<char*>(&run), 4)) {
    for (uint32_t i = 0; i < run && pos < grid.occupancy.size(); ++i) grid.occupancy[pos++] = cur;
    cur = !cur;
  }
  return grid;
}

}  // namespace binpick
