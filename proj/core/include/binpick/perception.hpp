#pragma once

#include "binpick/camera.hpp"
#include "binpick/object.hpp"

namespace binpick {

/// Depth corruption preset; the hole probability is a piecewise-linear
/// function of the surface incidence angle (degrees -> probability).
struct DepthNoisePreset {
  std::string name = "enhanced";
  double gaussian_sigma = 0.001;  // meters
  std::vector<std::pair<double, double>> hole_table = {{0.0, 0.0}, {90.0, 0.005}};
  /// Scale applied to the pose-estimate emulator noise; degraded depth
  /// degrades the estimator with it.
  double pose_noise_scale = 1.0;

  static DepthNoisePreset enhanced();
  static DepthNoisePreset raw();
  static DepthNoisePreset by_name(const std::string& name);

  double hole_prob(double incidence_rad) const;
};

DepthImage corrupt_depth(const DepthImage& depth, std::span<const double> incidence,
                         const DepthNoisePreset& preset, uint64_t seed);

struct PoseEstimate {
  int class_id = -1;
  Pose pose;  // camera frame
  double confidence = 0.0;             // [0, 1]
  Eigen::Vector2d bbox_center = Eigen::Vector2d::Zero();  // pixels
  double z_mean = 0.0;                 // meters, mean mask depth
  int iteration = 0;

  // emulator ground-truth labels (not available on a real system)
  int truth_id = -1;
  bool injected_rear_flip = false;
  bool injected_symmetry = false;
};

struct PoseNoiseModel {
  double sigma_rot = 0.105;      // rad, per rotation-vector axis
  double sigma_trans = 0.004;    // meters, per axis
  double p_detect = 0.95;
  double p_sym = 0.15;           // random symmetry element applied
  double p_rear = 0.02;          // rear-surface flip failure
  double detectability_threshold = 0.2;  // visible-surface fraction
};

struct SceneObjectView {
  int id = -1;
  const ObjectModel* model = nullptr;
  Pose world_pose;
};

/// Simulated pose estimator: perturbs ground truth, injects symmetry and
/// rear-flip failures, and reports the observed bounding box and mean mask
/// depth from the rendered true scene.
std::vector<PoseEstimate> emit_pose_estimates(std::span<const SceneObjectView> objects,
                                              const Pose& camera_pose,
                                              const CameraIntrinsics& intrinsics,
                                              const RenderResult& truth_render,
                                              const DepthImage& corrupted_depth,
                                              const PoseNoiseModel& model,
                                              const DepthNoisePreset& preset, uint64_t seed,
                                              int iteration);

/// Keep/reject decision of the depth-consistency filter: reject when the
/// estimated centroid sits in front of the observed mean mask depth by more
/// than `margin`.
bool rejection_filter_keep(const PoseEstimate& estimate, const CameraIntrinsics& intrinsics,
                           double margin = 0.005);

}  // namespace binpick
