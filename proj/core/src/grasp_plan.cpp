#include "binpick/grasp_plan.hpp"

#include <algorithm>
#include <cmath>

namespace binpick {

namespace {
constexpr double kFingerClearance = 0.002;  // matches the offline filter default

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }
}  // namespace

const char* to_string(FailReason r) {
  switch (r) {
    case FailReason::unreachable: return "unreachable";
    case FailReason::static_hit: return "static_hit";
    case FailReason::object_hit: return "object_hit";
    case FailReason::voxel_hit: return "voxel_hit";
  }
  return "?";
}

RankedGrasp score_grasp(const GraspCandidate& candidate, int candidate_index,
                        const SceneTarget& target, double max_confidence, double fill_z,
                        const BinFrame& bin, const ScoreWeights& weights) {
  const ScoreWeights w = weights.normalized();
  RankedGrasp g;
  g.track_id = target.track_id;
  g.candidate_index = candidate_index;
  g.candidate = candidate;
  g.world_from_ee = target.pose * candidate.obj_from_ee;

  const Mat3 r = g.world_from_ee.rotation.matrix();
  const Vec3 z_ee = r.col(2);
  const Vec3 x_ee = r.col(0);
  const Vec3 z_g(0, 0, -1);
  g.s_align = clamp01(0.5 * (1.0 + z_ee.dot(z_g)));
  Vec3 axis = bin.principal_axis;
  axis.z() = 0.0;
  axis = axis.norm() > 1e-12 ? Vec3(axis.normalized()) : Vec3::UnitX();
  g.s_yaw = clamp01(0.5 * (1.0 + std::abs(x_ee.dot(axis))));
  g.s_conf = max_confidence > 0 ? clamp01(target.confidence / max_confidence) : 0.0;
  const double denom = fill_z - bin.floor_z;
  g.s_height = denom > 1e-12 ? clamp01((target.pose.translation.z() - bin.floor_z) / denom) : 1.0;
  g.score = w.align * g.s_align + w.yaw * g.s_yaw + w.conf * g.s_conf + w.height * g.s_height;
  return g;
}

std::vector<RankedGrasp> rank_and_truncate(std::vector<RankedGrasp> grasps, double fraction) {
  if (grasps.empty()) return grasps;
  std::sort(grasps.begin(), grasps.end(), [](const RankedGrasp& a, const RankedGrasp& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.track_id != b.track_id) return a.track_id < b.track_id;
    return a.candidate_index < b.candidate_index;
  });
  const size_t keep = size_t(std::ceil(fraction * double(grasps.size())));
  grasps.resize(std::min(grasps.size(), std::max<size_t>(keep, 1)));
  return grasps;
}

namespace {

/// Gripper bodies posed in the world for a grasp pose.
std::vector<std::pair<const Bvh*, Pose>> gripper_world(const GripperModel& gripper,
                                                       const Pose& world_from_ee, double width) {
  auto bodies = gripper.assembly_at(width, kFingerClearance);
  for (auto& [bvh, local] : bodies) local = world_from_ee * local;
  return bodies;
}

bool hits_static(const std::vector<std::pair<const Bvh*, Pose>>& bodies, const SceneState& scene) {
  for (const auto& [bvh, pose] : bodies)
    for (const auto& s : scene.statics)
      if (meshes_intersect(*s.bvh, s.pose, *bvh, pose)) return true;
  return false;
}

bool hits_other_target(const std::vector<std::pair<const Bvh*, Pose>>& bodies,
                       const SceneState& scene, int exempt_track) {
  for (const auto& [bvh, pose] : bodies)
    for (const auto& t : scene.targets) {
      if (t.track_id == exempt_track) continue;
      if (meshes_intersect(t.model.bvh(), t.pose, *bvh, pose)) return true;
    }
  return false;
}

size_t voxel_overlaps(const std::vector<std::pair<const Bvh*, Pose>>& bodies,
                      const VoxelGrid& grid, size_t cap) {
  size_t total = 0;
  for (const auto& [bvh, pose] : bodies) {
    total += voxel_overlap_count(grid, *bvh, pose, cap - std::min(cap, total));
    if (total >= cap) return total;
  }
  return total;
}

}  // namespace

std::optional<FailReason> static_pose_validation(const RankedGrasp& grasp, const SceneState& scene,
                                                 const GripperModel& gripper,
                                                 const ReachModel& reach) {
  const Vec3& t = grasp.world_from_ee.translation;
  const double dist = (t - reach.base).norm();
  if (dist < reach.r_min || dist > reach.r_max) return FailReason::unreachable;
  const Vec3 z_ee = grasp.world_from_ee.rotation.matrix().col(2);
  const double tilt = std::acos(std::clamp(z_ee.dot(Vec3(0, 0, -1)), -1.0, 1.0));
  if (tilt > reach.max_tilt) return FailReason::unreachable;

  const auto bodies = gripper_world(gripper, grasp.world_from_ee, grasp.candidate.width);
  if (hits_static(bodies, scene)) return FailReason::static_hit;
  if (hits_other_target(bodies, scene, grasp.track_id)) return FailReason::object_hit;
  for (const auto& [bvh, pose] : bodies)
    if (voxels_collide(scene.voxels, *bvh, pose)) return FailReason::voxel_hit;
  return std::nullopt;
}

namespace {

double profile_time(double s, double total, double vmax, double acc) {
  // trapezoidal (or triangular) speed profile over arc length
  const double s_ramp = 0.5 * vmax * vmax / acc;
  if (total <= 2 * s_ramp) {
    const double half = 0.5 * total;
    const double t_half = std::sqrt(2.0 * half / acc);
    if (s <= half) return std::sqrt(2.0 * s / acc);
    return 2 * t_half - std::sqrt(std::max(0.0, 2.0 * (total - s) / acc));
  }
  const double t_ramp = vmax / acc;
  if (s <= s_ramp) return std::sqrt(2.0 * s / acc);
  if (s <= total - s_ramp) return t_ramp + (s - s_ramp) / vmax;
  return t_ramp + (total - 2 * s_ramp) / vmax + (t_ramp - std::sqrt(std::max(0.0, 2.0 * (total - s) / acc)));
}

}  // namespace

std::variant<GraspTrajectory, TrajectoryFail> trajectory_validation(const RankedGrasp& grasp,
                                                                    const SceneState& scene,
                                                                    const GripperModel& gripper,
                                                                    const BinFrame& bin,
                                                                    const MotionConfig& motion) {
  const Pose& g = grasp.world_from_ee;
  const Vec3 approach_out = -g.rotation.matrix().col(2);  // away from the object

  std::vector<Pose> keys;
  keys.emplace_back(g.rotation, g.translation + motion.pre_grasp_offset * approach_out);  // pre
  keys.push_back(g);                                                                      // grasp
  const double lift_z = std::max(g.translation.z(), bin.top_z + motion.lift_margin);
  keys.emplace_back(g.rotation, Vec3(g.translation.x(), g.translation.y(), lift_z));      // lift
  keys.emplace_back(g.rotation, Vec3(g.translation.x(), g.translation.y(),
                                     lift_z + motion.retreat_clearance));                 // retreat

  double step = motion.sweep_step;
  if (scene.voxels.resolution > 0) step = std::min(step, scene.voxels.resolution);

  GraspTrajectory traj;
  double arc = 0.0;
  std::vector<double> arcs;
  for (size_t k = 0; k + 1 < keys.size(); ++k) {
    const Vec3 a = keys[k].translation, b = keys[k + 1].translation;
    const double len = (b - a).norm();
    const int n = std::max(1, int(std::ceil(len / step)));
    for (int i = (k == 0 ? 0 : 1); i <= n; ++i) {
      const double s = double(i) / n;
      traj.waypoints.push_back({Pose(g.rotation, a + s * (b - a)), 0.0});
      arcs.push_back(arc + s * len);
      if (k == 0 && i == n) traj.grasp_index = traj.waypoints.size() - 1;
    }
    arc += len;
  }
  for (size_t i = 0; i < traj.waypoints.size(); ++i)
    traj.waypoints[i].time = profile_time(arcs[i], arc, motion.speed, motion.accel);
  traj.duration = traj.waypoints.empty() ? 0.0 : traj.waypoints.back().time;

  for (size_t i = 0; i < traj.waypoints.size(); ++i) {
    const auto bodies = gripper_world(gripper, traj.waypoints[i].pose, grasp.candidate.width);
    if (hits_static(bodies, scene)) return TrajectoryFail{FailReason::static_hit, i};
    if (voxel_overlaps(bodies, scene.voxels, motion.voxel_budget + 1) > motion.voxel_budget)
      return TrajectoryFail{FailReason::voxel_hit, i};
  }
  return traj;
}

PlanOutcome plan(const SceneState& scene, const std::map<int, GraspDatabase>& dbs,
                 const GripperModel& gripper, const PlannerConfig& config) {
  PlanOutcome out;
  if (scene.targets.empty()) {
    out.early_exit = EarlyExitReason::no_targets;
    return out;
  }

  double max_conf = 0.0, fill_z = -std::numeric_limits<double>::infinity();
  for (const auto& t : scene.targets) {
    max_conf = std::max(max_conf, t.confidence);
    fill_z = std::max(fill_z, t.pose.translation.z());
  }

  std::vector<RankedGrasp> all;
  for (const auto& t : scene.targets) {
    const auto it = dbs.find(t.model.class_id());
    if (it == dbs.end()) continue;
    const auto& db = it->second;
    for (size_t i = 0; i < db.candidates.size(); ++i)
      all.push_back(score_grasp(db.candidates[i], int(i), t, max_conf, fill_z, config.bin,
                                config.weights));
  }
  out.candidate_count = all.size();
  if (all.empty()) {
    out.early_exit = EarlyExitReason::no_feasible;
    return out;
  }

  const auto shortlist = rank_and_truncate(std::move(all), config.shortlist_fraction);
  out.shortlist_size = shortlist.size();
  for (const auto& g : shortlist) {
    if (const auto fail = static_pose_validation(g, scene, gripper, config.reach)) {
      ++out.fail_histogram[*fail];
      continue;
    }
    auto result = trajectory_validation(g, scene, gripper, config.bin, config.motion);
    if (auto* fail = std::get_if<TrajectoryFail>(&result)) {
      ++out.fail_histogram[fail->reason];
      continue;
    }
    out.planned = true;
    out.grasp = g;
    out.trajectory = std::get<GraspTrajectory>(std::move(result));
    return out;
  }
  out.early_exit = EarlyExitReason::no_feasible;
  return out;
}

bool replay_trajectory_ok(const GraspTrajectory& trajectory, const RankedGrasp& grasp,
                          const SceneState& scene, const GripperModel& gripper,
                          const MotionConfig& motion) {
  for (size_t i = 0; i < trajectory.waypoints.size(); ++i) {
    if (i > 0) {
      const double d = (trajectory.waypoints[i].pose.translation -
                        trajectory.waypoints[i - 1].pose.translation)
                           .norm();
      if (d > motion.sweep_step + 1e-9) return false;
    }
    const auto bodies = gripper_world(gripper, trajectory.waypoints[i].pose, grasp.candidate.width);
    if (hits_static(bodies, scene)) return false;
    if (voxel_overlaps(bodies, scene.voxels, motion.voxel_budget + 1) > motion.voxel_budget)
      return false;
  }
  return true;
}

}  // namespace binpick
