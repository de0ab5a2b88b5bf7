#pragma once

#include "binpick/config.hpp"
#include "binpick/grasp_plan.hpp"
#include "binpick/perception.hpp"

#include <random>

namespace binpick {

struct FillFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoReachableViewpoint : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BinSpec {
  Vec3 interior = Vec3(0.30, 0.20, 0.12);  // meters
  double wall_thickness = 0.010;
  Pose pose;  // world pose of the interior-floor center
};

struct BinInstance {
  int id = -1;
  int class_id = -1;
  Pose pose;  // world
};

/// Ground-truth bin contents plus the static geometry around them.
struct BinScene {
  BinSpec spec;
  std::shared_ptr<const TriangleMesh> bin_mesh;
  std::shared_ptr<const Bvh> bin_bvh;
  std::shared_ptr<const TriangleMesh> table_mesh;
  std::shared_ptr<const Bvh> table_bvh;
  std::vector<BinInstance> instances;
  int initial_fill = 0;
  bool fill_incomplete = false;

  std::vector<PosedMesh> statics() const {
    return {{bin_bvh.get(), spec.pose}, {table_bvh.get(), spec.pose}};
  }
};

/// Sequential settle fill: sample (x, y, yaw) and a stable orientation,
/// lower onto a height map, reject interpenetrations. Deterministic per
/// seed. When the sample budget runs out the partial fill is returned with
/// fill_incomplete set; FillFailure is reserved for impossible setups
/// (object footprint larger than the bin).
BinScene generate_bin(const ObjectModel& model, int target_count, const BinSpec& spec,
                      uint64_t seed);

struct ViewpointPlan {
  std::vector<Pose> poses;  // ordered, each aimed at the bin center
};

/// Fibonacci-hemisphere camera poses at `radius` above the bin center,
/// reachability-filtered and greedily ordered farthest-first starting from
/// the top-down pose.
ViewpointPlan plan_viewpoints(const Pose& bin_pose, double radius, int n_samples,
                              const ReachModel& reach);

struct VerificationConfig {
  double epsilon = 1e-4;                           // meters, finger-closure check
  double friction_cone_half = 15.0 * M_PI / 180.0; // radians
  double disturb_translation = 0.005;              // failed-grasp perturbation bound
  double disturb_rotation = 5.0 * M_PI / 180.0;
};

enum class ExecStatus { success, fail_empty, fail_slip };
const char* to_string(ExecStatus s);

struct ExecResult {
  ExecStatus status = ExecStatus::fail_empty;
  double finger_distance = 0.0;  // meters at closure
  int picked_instance = -1;      // ground-truth id on success
};

/// Closes the fingers against the ground-truth scene and applies the
/// position and velocity checks. Mutates the scene: removes the object on
/// success, perturbs it on failure.
ExecResult simulate_grasp_execution(const GraspTrajectory& trajectory, const RankedGrasp& grasp,
                                    BinScene& scene, const std::map<int, ObjectModel>& models,
                                    const GripperModel& gripper,
                                    const VerificationConfig& config, uint64_t seed);

struct StageDurations {
  double acquisition = 0.2;
  double perception = 0.8;
  double planning = 0.4;
  double motion_grasp = 3.0;
  double motion_release = 0.0;

  double compute_time() const { return perception + planning; }
  double motion_time() const { return motion_grasp + motion_release; }
};

/// Masked-time model: acquisition starts the iteration; perception and
/// planning overlap the motion pending from the previous iteration.
inline double masked_time_step(const StageDurations& d, double pending_motion) {
  return d.acquisition + std::max(d.compute_time(), pending_motion);
}

struct MetricsBucket {
  double start = 0.0;  // seconds
  int iterations = 0;
  int attempts = 0;
  int successes = 0;
  int early_exits = 0;
};

struct RunMetrics {
  int iterations = 0;
  int attempts = 0;
  int successes = 0;
  int early_exits = 0;
  double elapsed = 0.0;  // simulated seconds
  std::vector<MetricsBucket> buckets;  // 5-minute simulated-time buckets

  double mpph() const { return elapsed > 0 ? successes * 3600.0 / elapsed : 0.0; }
  std::optional<double> sr() const {
    return attempts > 0 ? std::optional<double>(double(successes) / attempts) : std::nullopt;
  }
  double eer() const { return iterations > 0 ? double(early_exits) / iterations : 0.0; }
};

struct RunConfig {
  uint64_t seed = 1;
  int max_iterations = 1000;
  double duration_budget = std::numeric_limits<double>::infinity();  // simulated seconds
  bool memory = true;
  std::string depth_preset = "enhanced";

  // scene
  std::string object_shape = "box";  // box | cylinder | lshape
  Vec3 box_extents = Vec3(0.040, 0.030, 0.016);
  double cylinder_radius = 0.012;
  double cylinder_height = 0.048;
  Vec3 lshape_dims = Vec3(0.045, 0.020, 0.012);  // leg, width, thickness
  int fill_count = 100;
  BinSpec bin;

  // perception
  CameraIntrinsics camera{140.0, 140.0, 80.0, 60.0, 160, 120};
  double sensor_distance = 0.45;
  int viewpoint_samples = 24;
  PoseNoiseModel noise;
  double rejection_margin = 0.005;

  // fusion / scene
  BufferConfig buffer;
  CarveConfig carve;
  double voxel_resolution = 0.005;

  // planning / execution
  GripperModel::Params gripper;
  GraspGenConfig grasp_gen;
  PlannerConfig planner;
  VerificationConfig verification;
  StageDurations durations;
  std::string grasp_db_path;  // optional pre-generated database

  bool dump_voxels = false;

  static RunConfig from_toml(const TomlDoc& doc);
  static RunConfig from_toml_file(const std::string& path);
};

struct RunResult {
  RunMetrics metrics;
  std::string events_path;   // empty when no output dir was given
  std::string metrics_path;
};

ObjectModel build_object_model(const RunConfig& config);
GraspDatabase load_or_generate_db(const RunConfig& config, const ObjectModel& model,
                                  const GripperModel& gripper);

/// Full acquire -> perceive -> fuse -> plan -> execute loop under the
/// masked-time model. Writes events.jsonl and metrics.csv into `out_dir`
/// when non-empty.
RunResult run_simulation(const RunConfig& config, const std::string& out_dir = "");

void write_metrics_csv(const RunMetrics& metrics, const std::string& path);

}  // namespace binpick
