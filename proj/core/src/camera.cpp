#include "binpick/camera.hpp"

#include <algorithm>
#include <fstream>

namespace binpick {

size_t DepthImage::valid_count() const {
  return size_t(std::count_if(data.begin(), data.end(), [](double d) { return d > 0.0; }));
}

void write_pgm16(const DepthImage& depth, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write PGM: " + path);
  out << "P5\n" << depth.width << " " << depth.height << "\n65535\n";
  for (double d : depth.data) {
    const uint32_t mm = uint32_t(std::clamp(d * 1000.0 + 0.5, 0.0, 65535.0));
    const uint8_t bytes[2] = {uint8_t(mm >> 8), uint8_t(mm & 0xff)};  // PGM is big-endian
    out.write(reinterpret_cast<const char*>(bytes), 2);
  }
}

RenderResult render_scene(std::span<const RenderItem> items, const Pose& camera_pose,
                          const CameraIntrinsics& k) {
  k.validate();
  RenderResult out;
  out.depth = DepthImage(k.width, k.height);
  out.instance.assign(size_t(k.width) * k.height, -2);
  out.incidence.assign(size_t(k.width) * k.height, 0.0);

  // One merged world-frame mesh and BVH for the whole frame.
  TriangleMesh merged;
  std::vector<int> tri_id;
  for (const auto& it : items) {
    if (!it.bvh || it.bvh->empty()) continue;
    const TriangleMesh posed = it.bvh->mesh().transformed(it.pose);
    const uint32_t base = uint32_t(merged.vertices.size());
    merged.vertices.insert(merged.vertices.end(), posed.vertices.begin(), posed.vertices.end());
    for (const auto& t : posed.triangles)
      merged.triangles.push_back({t[0] + base, t[1] + base, t[2] + base});
    merged.normals.insert(merged.normals.end(), posed.normals.begin(), posed.normals.end());
    tri_id.insert(tri_id.end(), posed.triangles.size(), it.id);
  }
  if (merged.triangles.empty()) return out;
  const Bvh bvh(merged);

  const Mat3 cam_rot = camera_pose.rotation.matrix();
  for (int v = 0; v < k.height; ++v) {
    for (int u = 0; u < k.width; ++u) {
      // ray through the pixel center, z-normalized so t equals camera z depth
      const Vec3 dir_cam((u + 0.5 - k.cx) / k.fx, (v + 0.5 - k.cy) / k.fy, 1.0);
      const double dir_len = dir_cam.norm();
      const Vec3 dir_world = cam_rot * dir_cam;
      const auto hit = bvh.raycast(camera_pose.translation, dir_world, kRayEpsilon);
      if (!hit) continue;
      const size_t px = size_t(v) * k.width + u;
      out.depth.data[px] = hit->distance / dir_len;  // camera z
      out.instance[px] = tri_id[hit->triangle];
      out.incidence[px] =
          std::acos(std::clamp(std::abs(hit->normal.dot(dir_world.normalized())), 0.0, 1.0));
    }
  }
  return out;
}

DepthImage render_depth(std::span<const RenderItem> items, const Pose& camera_pose,
                        const CameraIntrinsics& k) {
  return render_scene(items, camera_pose, k).depth;
}

size_t render_alone_pixel_count(const RenderItem& item, const Pose& camera_pose,
                                const CameraIntrinsics& k) {
  if (!item.bvh || item.bvh->empty()) return 0;
  const Pose cam_to_local = item.pose.inverse() * camera_pose;
  const Pose local_to_cam = cam_to_local.inverse();

  // conservative projected rect from the 8 AABB corners
  const Aabb box = item.bvh->root_aabb();
  int u0 = k.width, u1 = -1, v0 = k.height, v1 = -1;
  bool any_front = false;
  for (int c = 0; c < 8; ++c) {
    const Vec3 corner((c & 1) ? box.hi.x() : box.lo.x(), (c & 2) ? box.hi.y() : box.lo.y(),
                      (c & 4) ? box.hi.z() : box.lo.z());
    const Vec3 p = local_to_cam * corner;
    if (p.z() <= 1e-6) continue;
    any_front = true;
    const auto uv = k.project(p);
    u0 = std::min(u0, int(std::floor(uv.x())));
    u1 = std::max(u1, int(std::ceil(uv.x())));
    v0 = std::min(v0, int(std::floor(uv.y())));
    v1 = std::max(v1, int(std::ceil(uv.y())));
  }
  if (!any_front) return 0;
  u0 = std::max(u0, 0);
  v0 = std::max(v0, 0);
  u1 = std::min(u1, k.width - 1);
  v1 = std::min(v1, k.height - 1);

  size_t count = 0;
  for (int v = v0; v <= v1; ++v)
    for (int u = u0; u <= u1; ++u) {
      const Vec3 dir_cam((u + 0.5 - k.cx) / k.fx, (v + 0.5 - k.cy) / k.fy, 1.0);
      const Vec3 o = cam_to_local.translation;
      const Vec3 d = cam_to_local.rotation * dir_cam;
      if (item.bvh->raycast(o, d)) ++count;
    }
  return count;
}

}  // namespace binpick
