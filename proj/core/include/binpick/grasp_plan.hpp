#pragma once

#include "binpick/grasp_gen.hpp"
#include "binpick/scene.hpp"

#include <map>
#include <optional>
#include <variant>

namespace binpick {

struct ScoreWeights {
  double align = 0.4, yaw = 0.1, conf = 0.2, height = 0.3;

  ScoreWeights normalized() const {
    const double s = align + yaw + conf + height;
    if (s <= 0) throw std::invalid_argument("score weights must sum to > 0");
    return {align / s, yaw / s, conf / s, height / s};
  }
};

/// Bin frame description used for scoring and trajectory clearance.
struct BinFrame {
  Vec3 principal_axis = Vec3::UnitX();  // long horizontal edge, world frame
  double floor_z = 0.0;
  double top_z = 0.2;  // wall top height, world
};

/// Spherical-shell reachability proxy with an approach-tilt limit.
struct ReachModel {
  Vec3 base = Vec3(-0.5, 0.0, 0.2);
  double r_min = 0.15;
  double r_max = 1.0;
  double max_tilt = 65.0 * M_PI / 180.0;  // approach deviation from vertical
};

struct RankedGrasp {
  int track_id = -1;
  int candidate_index = -1;
  GraspCandidate candidate;
  Pose world_from_ee;
  double s_align = 0, s_yaw = 0, s_conf = 0, s_height = 0;
  double score = 0;
};

RankedGrasp score_grasp(const GraspCandidate& candidate, int candidate_index,
                        const SceneTarget& target, double max_confidence, double fill_z,
                        const BinFrame& bin, const ScoreWeights& weights);

/// Sort by score descending (ties by track id then candidate index) and keep
/// ceil(fraction * count).
std::vector<RankedGrasp> rank_and_truncate(std::vector<RankedGrasp> grasps, double fraction);

enum class FailReason { unreachable, static_hit, object_hit, voxel_hit };
const char* to_string(FailReason r);

struct MotionConfig {
  double pre_grasp_offset = 0.080;   // meters along -approach
  double retreat_clearance = 0.070;  // above the lift height
  double lift_margin = 0.050;        // above the bin walls
  double sweep_step = 0.005;         // meters; clamped to the voxel resolution
  size_t voxel_budget = 8;           // max distinct voxel overlaps per sweep pose
  double speed = 0.25;               // m/s, trapezoidal profile
  double accel = 1.0;                // m/s^2
};

struct Waypoint {
  Pose pose;
  double time = 0.0;  // seconds from trajectory start
};

struct GraspTrajectory {
  std::vector<Waypoint> waypoints;  // dense sweep samples
  size_t grasp_index = 0;           // waypoint at the grasp pose
  double duration = 0.0;
};

std::optional<FailReason> static_pose_validation(const RankedGrasp& grasp, const SceneState& scene,
                                                 const GripperModel& gripper,
                                                 const ReachModel& reach);

struct TrajectoryFail {
  FailReason reason;
  size_t waypoint;
};

/// Pre-grasp, descent, lift, retreat; statics strict, voxels budgeted.
std::variant<GraspTrajectory, TrajectoryFail> trajectory_validation(const RankedGrasp& grasp,
                                                                    const SceneState& scene,
                                                                    const GripperModel& gripper,
                                                                    const BinFrame& bin,
                                                                    const MotionConfig& motion);

enum class EarlyExitReason { none, no_targets, no_feasible };

struct PlanOutcome {
  bool planned = false;
  EarlyExitReason early_exit = EarlyExitReason::none;
  RankedGrasp grasp;          // valid when planned
  GraspTrajectory trajectory; // valid when planned
  std::map<FailReason, int> fail_histogram;
  size_t shortlist_size = 0;
  size_t candidate_count = 0;
};

struct PlannerConfig {
  ScoreWeights weights;
  double shortlist_fraction = 0.18;
  ReachModel reach;
  MotionConfig motion;
  BinFrame bin;
};

PlanOutcome plan(const SceneState& scene, const std::map<int, GraspDatabase>& dbs,
                 const GripperModel& gripper, const PlannerConfig& config);

/// Replays a trajectory against the scene; returns true when no strict
/// static collision occurs and every pose stays within the voxel budget.
bool replay_trajectory_ok(const GraspTrajectory& trajectory, const RankedGrasp& grasp,
                          const SceneState& scene, const GripperModel& gripper,
                          const MotionConfig& motion);

}  // namespace binpick
