#pragma once

#include "binpick/object.hpp"

#include <memory>
#include <string>

namespace binpick {

struct VersionMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegeneratePair : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Parallel-jaw gripper. End-effector frame: origin between the fingertips,
/// +z approaches the object, +y is the finger stroke (closing) axis, +x the
/// lateral axis. Finger meshes are stored at zero opening.
class GripperModel {
 public:
  struct Params {
    double max_opening = 0.085;
    double finger_length = 0.050;
    double finger_thickness = 0.010;  // along the stroke axis
    double finger_width = 0.020;      // lateral
    double palm_height = 0.030;
    double palm_lateral = 0.030;
  };

  GripperModel() : GripperModel(Params{}) {}
  explicit GripperModel(const Params& params);
  static GripperModel from_json_file(const std::string& path);

  double max_opening() const { return params_.max_opening; }
  const Params& params() const { return params_; }
  Vec3 stroke_axis() const { return Vec3::UnitY(); }
  Vec3 approach_axis() const { return Vec3::UnitZ(); }
  Vec3 lateral_axis() const { return Vec3::UnitX(); }

  const Bvh& finger_bvh() const { return *finger_bvh_; }
  const Bvh& palm_bvh() const { return *palm_bvh_; }

  /// Body poses (in the ee frame) of both fingers and the palm with the
  /// fingers opened to `width` plus per-finger clearance.
  std::vector<std::pair<const Bvh*, Pose>> assembly_at(double width, double clearance) const;

 private:
  Params params_;
  std::shared_ptr<const TriangleMesh> finger_mesh_;  // +y finger at zero opening
  std::shared_ptr<const TriangleMesh> palm_mesh_;
  std::shared_ptr<const Bvh> finger_bvh_;
  std::shared_ptr<const Bvh> palm_bvh_;
};

struct AntipodalPair {
  Vec3 c1, n1, c2, n2;
  double angle_error;  // max of the two antipodal deviation angles
};

struct GraspCandidate {
  Pose obj_from_ee;              // end-effector pose in the object frame
  Vec3 contact1 = Vec3::Zero();  // object frame
  Vec3 contact2 = Vec3::Zero();
  double width = 0.0;
  double antipodal_error = 0.0;
};

struct GraspGenConfig {
  int target_pairs = 64;                       // N
  double antipodal_tolerance = 10.0 * M_PI / 180.0;
  int approach_samples = 8;                    // D
  uint64_t seed = 0;
  int budget_factor = 50;                      // sample budget = factor * N
  double finger_clearance = 0.002;             // per finger, collision filter

  void validate() const {
    if (target_pairs < 1) throw std::invalid_argument("target_pairs must be >= 1");
    if (antipodal_tolerance <= 0 || antipodal_tolerance >= M_PI / 2)
      throw std::invalid_argument("antipodal_tolerance must be in (0, pi/2)");
  }
};

struct PairSampleResult {
  std::vector<AntipodalPair> pairs;
  bool budget_exhausted = false;
};

PairSampleResult sample_antipodal_pairs(const TriangleMesh& mesh, const Bvh& bvh,
                                        const GripperModel& gripper, const GraspGenConfig& config);

std::vector<GraspCandidate> define_frames(const AntipodalPair& pair, const Vec3& center,
                                          const GraspGenConfig& config);

std::vector<GraspCandidate> filter_gripper_collisions(std::span<const GraspCandidate> candidates,
                                                      const Bvh& object, const GripperModel& gripper,
                                                      double clearance);

struct GraspDatabase {
  static constexpr int kFormatVersion = 1;
  int class_id = -1;
  std::string frame_convention = "tcp-midpoint-z-toward-object";
  GraspGenConfig config;
  std::vector<GraspCandidate> candidates;
  bool budget_exhausted = false;
};

GraspDatabase generate_grasp_db(const ObjectModel& object, const GripperModel& gripper,
                                const GraspGenConfig& config);

void write_db(const GraspDatabase& db, const std::string& path);
GraspDatabase read_db(const std::string& path);

}  // namespace binpick
