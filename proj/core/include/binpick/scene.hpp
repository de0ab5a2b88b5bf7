#pragma once

#include "binpick/camera.hpp"
#include "binpick/object.hpp"
#include "binpick/pose_buffer.hpp"

#include <string>
#include <vector>

namespace binpick {

struct VoxelGrid {
  Vec3 origin = Vec3::Zero();  // corner of voxel (0,0,0)
  double resolution = 0.005;   // meters per voxel
  Eigen::Vector3i dims = Eigen::Vector3i::Zero();
  std::vector<bool> occupancy;

  VoxelGrid() = default;
  VoxelGrid(const Vec3& origin_, double resolution_, const Eigen::Vector3i& dims_)
      : origin(origin_), resolution(resolution_), dims(dims_),
        occupancy(size_t(dims_.x()) * dims_.y() * dims_.z(), false) {
    if (resolution <= 0) throw std::invalid_argument("voxel resolution must be > 0");
  }

  size_t index(int x, int y, int z) const {
    return (size_t(z) * dims.y() + y) * dims.x() + x;
  }
  bool in_bounds(const Eigen::Vector3i& c) const {
    return (c.array() >= 0).all() && (c.array() < dims.array()).all();
  }
  Eigen::Vector3i cell_of(const Vec3& p) const {
    return ((p - origin) / resolution).array().floor().cast<int>();
  }
  Aabb cell_aabb(const Eigen::Vector3i& c) const {
    Aabb b;
    b.lo = origin + resolution * c.cast<double>();
    b.hi = b.lo + Vec3::Constant(resolution);
    return b;
  }
  size_t occupied_count() const;
};

/// One world point per valid depth pixel.
std::vector<Vec3> depth_to_points(const DepthImage& depth, const CameraIntrinsics& intrinsics,
                                  const Pose& camera_pose);

struct PosedMesh {
  const Bvh* bvh = nullptr;
  Pose pose;
};

struct CarveConfig {
  double assoc_tolerance = 0.008;  // meters
  int min_points_per_voxel = 2;
};

/// Marks voxels supported by points not explained by any target or static
/// mesh within the association tolerance.
VoxelGrid classify_and_carve(std::span<const Vec3> points, std::span<const PosedMesh> targets,
                             std::span<const PosedMesh> statics, const CarveConfig& config,
                             const VoxelGrid& grid_spec);

bool voxels_collide(const VoxelGrid& grid, const Bvh& mesh, const Pose& pose);
/// Number of distinct occupied voxels the posed mesh overlaps, capped at `cap`.
size_t voxel_overlap_count(const VoxelGrid& grid, const Bvh& mesh, const Pose& pose,
                           size_t cap = std::numeric_limits<size_t>::max());

/// RLE binary dump plus JSON sidecar header; `path` gets ".bin" and ".json".
void dump_voxel_grid(const VoxelGrid& grid, const std::string& path_stem);
VoxelGrid load_voxel_grid(const std::string& path_stem);

/// Planner world model for one iteration: validated targets, statics, and
/// carved occupancy. Immutable snapshot.
struct SceneTarget {
  int track_id;
  ObjectModel model;
  Pose pose;  // world
  double confidence;
  int truth_id;
};

struct SceneState {
  std::vector<SceneTarget> targets;
  std::vector<PosedMesh> statics;
  VoxelGrid voxels;
  int iteration = 0;
};

}  // namespace binpick
