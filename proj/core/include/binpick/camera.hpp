#pragma once

#include "binpick/mesh.hpp"

#include <string>
#include <vector>

namespace binpick {

struct CameraIntrinsics {
  double fx = 0, fy = 0;   // pixels
  double cx = 0, cy = 0;   // pixels
  int width = 0, height = 0;

  void validate() const {
    if (fx <= 0 || fy <= 0) throw std::invalid_argument("intrinsics: focal length must be > 0");
    if (cx < 0 || cx >= width || cy < 0 || cy >= height)
      throw std::invalid_argument("intrinsics: principal point outside image");
  }

  /// Pixel coordinates of a camera-frame point (z > 0 in front).
  Eigen::Vector2d project(const Vec3& p_cam) const {
    return {fx * p_cam.x() / p_cam.z() + cx, fy * p_cam.y() / p_cam.z() + cy};
  }
  Vec3 backproject(double u, double v, double z) const {
    return {(u - cx) / fx * z, (v - cy) / fy * z, z};
  }
};

struct InvalidDepth : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// K^-1 projection of a bounding-box center to a camera-frame point at the
/// observed mean mask depth.
inline Vec3 project_bb_center(const CameraIntrinsics& k, const Eigen::Vector2d& bbox_center,
                              double z_mean) {
  if (z_mean <= 0.0) throw InvalidDepth("project_bb_center: z_mean must be > 0");
  return k.backproject(bbox_center.x(), bbox_center.y(), z_mean);
}

/// Dense depth map; 0 marks an invalid pixel (hole).
struct DepthImage {
  int width = 0, height = 0;
  std::vector<double> data;  // row-major, meters

  DepthImage() = default;
  DepthImage(int w, int h) : width(w), height(h), data(size_t(w) * h, 0.0) {}
  double& at(int u, int v) { return data[size_t(v) * width + u]; }
  double at(int u, int v) const { return data[size_t(v) * width + u]; }
  size_t valid_count() const;
};

/// 16-bit PGM with millimeter quantization (values clamped at 65.535 m).
void write_pgm16(const DepthImage& depth, const std::string& path);

/// One rigid item to render: a BVH in its own frame plus its world pose.
struct RenderItem {
  const Bvh* bvh = nullptr;
  Pose pose;
  int id = -1;  // instance id reported in the id image; -1 for statics
};

struct RenderResult {
  DepthImage depth;
  std::vector<int> instance;      // per pixel; -2 = no hit
  std::vector<double> incidence;  // radians between surface normal and view ray
};

/// Per-pixel nearest-hit ray cast through pixel centers. Depth is the
/// camera-frame z coordinate of the hit.
RenderResult render_scene(std::span<const RenderItem> items, const Pose& camera_pose,
                          const CameraIntrinsics& intrinsics);

DepthImage render_depth(std::span<const RenderItem> items, const Pose& camera_pose,
                        const CameraIntrinsics& intrinsics);

/// Visible pixel count of one item rendered alone, restricted to its
/// projected bounding rectangle.
size_t render_alone_pixel_count(const RenderItem& item, const Pose& camera_pose,
                                const CameraIntrinsics& intrinsics);

}  // namespace binpick
