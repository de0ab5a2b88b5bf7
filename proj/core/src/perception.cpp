#include "binpick/perception.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace binpick {

DepthNoisePreset DepthNoisePreset::enhanced() {
  DepthNoisePreset p;
  p.name = "enhanced";
  p.gaussian_sigma = 0.001;
  p.hole_table = {{0.0, 0.0}, {90.0, 0.005}};
  p.pose_noise_scale = 1.0;
  return p;
}

DepthNoisePreset DepthNoisePreset::raw() {
  DepthNoisePreset p;
  p.name = "raw";
  p.gaussian_sigma = 0.004;
  p.hole_table = {{0.0, 0.0}, {45.0, 0.04}, {90.0, 0.20}};
  p.pose_noise_scale = 1.4;
  return p;
}

DepthNoisePreset DepthNoisePreset::by_name(const std::string& name) {
  if (name == "enhanced") return enhanced();
  if (name == "raw") return raw();
  throw std::invalid_argument("unknown depth preset: " + name);
}

double DepthNoisePreset::hole_prob(double incidence_rad) const {
  if (hole_table.empty()) return 0.0;
  const double deg = std::clamp(incidence_rad * 180.0 / M_PI, 0.0, 90.0);
  if (deg <= hole_table.front().first) return hole_table.front().second;
  for (size_t i = 1; i < hole_table.size(); ++i) {
    if (deg <= hole_table[i].first) {
      const auto& [x0, y0] = hole_table[i - 1];
      const auto& [x1, y1] = hole_table[i];
      const double t = x1 > x0 ? (deg - x0) / (x1 - x0) : 1.0;
      return y0 + t * (y1 - y0);
    }
  }
  return hole_table.back().second;
}

DepthImage corrupt_depth(const DepthImage& depth, std::span<const double> incidence,
                         const DepthNoisePreset& preset, uint64_t seed) {
  if (incidence.size() != depth.data.size())
    throw std::invalid_argument("corrupt_depth: incidence size mismatch");
  DepthImage out = depth;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (size_t i = 0; i < out.data.size(); ++i) {
    if (out.data[i] <= 0.0) continue;
    // One fixed draw pair per valid pixel keeps the stream aligned across presets.
    const double g = gauss(rng);
    const double h = uni(rng);
    if (h < preset.hole_prob(incidence[i])) {
      out.data[i] = 0.0;
      continue;
    }
    if (preset.gaussian_sigma > 0.0)
      out.data[i] = std::max(0.0, out.data[i] + preset.gaussian_sigma * g);
  }
  return out;
}

namespace {

Rotation random_symmetry_element(const SymmetryGroup& g, std::mt19937_64& rng) {
  std::uniform_int_distribution<size_t> pick(0, g.discrete.size() - 1);
  Rotation s = g.discrete[pick(rng)];
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  for (const Vec3& axis : g.continuous_axes) s = s * Rotation::from_axis_angle(axis, angle(rng));
  return s;
}

/// Entry-to-last-exit span of the view ray through the object, local frame.
double through_depth(const Bvh& bvh, const Vec3& origin_local, const Vec3& dir_local) {
  double first = -1.0, last = -1.0, t = 0.0;
  while (true) {
    const auto hit = bvh.raycast(origin_local, dir_local, t + kRayEpsilon);
    if (!hit) break;
    if (first < 0.0) first = hit->distance;
    last = hit->distance;
    t = hit->distance;
  }
  return (first >= 0.0 && last > first) ? last - first : 0.0;
}

}  // namespace

std::vector<PoseEstimate> emit_pose_estimates(std::span<const SceneObjectView> objects,
                                              const Pose& camera_pose,
                                              const CameraIntrinsics& k,
                                              const RenderResult& truth_render,
                                              const DepthImage& corrupted_depth,
                                              const PoseNoiseModel& model,
                                              const DepthNoisePreset& preset, uint64_t seed,
                                              int iteration) {
  std::vector<PoseEstimate> out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const Pose world_to_cam = camera_pose.inverse();
  const double sr = model.sigma_rot * preset.pose_noise_scale;
  const double st = model.sigma_trans * preset.pose_noise_scale;

  for (const auto& obj : objects) {
    // mask statistics from the true render
    int u0 = k.width, u1 = -1, v0 = k.height, v1 = -1;
    size_t mask_px = 0, valid_px = 0;
    double z_sum_corrupt = 0.0, z_sum_clean = 0.0;
    for (int v = 0; v < k.height; ++v)
      for (int u = 0; u < k.width; ++u) {
        const size_t px = size_t(v) * k.width + u;
        if (truth_render.instance[px] != obj.id) continue;
        ++mask_px;
        u0 = std::min(u0, u);
        u1 = std::max(u1, u);
        v0 = std::min(v0, v);
        v1 = std::max(v1, v);
        z_sum_clean += truth_render.depth.data[px];
        if (corrupted_depth.data[px] > 0.0) {
          ++valid_px;
          z_sum_corrupt += corrupted_depth.data[px];
        }
      }

    // Draw the per-object decisions unconditionally so the stream stays
    // aligned regardless of visibility.
    const double r_detect = uni(rng);
    const double r_sym = uni(rng);
    const double r_rear = uni(rng);
    Vec3 rot_noise(gauss(rng), gauss(rng), gauss(rng));
    Vec3 trans_noise(gauss(rng), gauss(rng), gauss(rng));
    const Rotation sym = random_symmetry_element(obj.model->symmetry(), rng);
    const double conf_noise = gauss(rng);

    if (mask_px == 0) continue;
    const size_t alone = render_alone_pixel_count({&obj.model->bvh(), obj.world_pose, obj.id},
                                                  camera_pose, k);
    const double fraction = alone > 0 ? double(valid_px) / double(alone) : 0.0;
    if (fraction < model.detectability_threshold) continue;
    if (r_detect >= model.p_detect) continue;

    PoseEstimate e;
    e.class_id = obj.model->class_id();
    e.truth_id = obj.id;
    e.iteration = iteration;
    const Pose truth_cam = world_to_cam * obj.world_pose;
    Pose est(Rotation::from_rotvec(sr * rot_noise) * truth_cam.rotation,
             truth_cam.translation + st * trans_noise);
    if (r_sym < model.p_sym) {
      est.rotation = est.rotation * sym;
      e.injected_symmetry = true;
    }
    if (r_rear < model.p_rear) {
      const Vec3 dir_cam = truth_cam.translation.normalized();
      const Pose cam_to_local = truth_cam.inverse();
      const double d = through_depth(obj.model->bvh(), cam_to_local.translation,
                                     cam_to_local.rotation * dir_cam);
      if (d > 0.0) {
        est.translation -= d * dir_cam;
        e.injected_rear_flip = true;
      }
    }
    e.pose = est;
    e.bbox_center = {0.5 * (u0 + u1) + 0.5, 0.5 * (v0 + v1) + 0.5};
    e.z_mean = valid_px > 0 ? z_sum_corrupt / double(valid_px)
                            : z_sum_clean / double(mask_px);
    e.confidence = std::clamp(0.4 + 0.6 * fraction + 0.05 * conf_noise, 0.0, 1.0);
    out.push_back(e);
  }
  return out;
}

bool rejection_filter_keep(const PoseEstimate& e, const CameraIntrinsics& k, double margin) {
  const Vec3 t_bb = project_bb_center(k, e.bbox_center, e.z_mean);
  return e.pose.translation.norm() >= t_bb.norm() - margin;
}

}  // namespace binpick
