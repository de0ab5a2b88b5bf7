#include "binpick/sim.hpp"

#include "binpick/primitives.hpp"
#include "binpick/pose_buffer.hpp"
#include "binpick/scene.hpp"

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>

namespace binpick {

namespace {

// Per-stage seed derivation (splitmix64) so changing one consumer's draw
// count cannot shift another stage's stream.
uint64_t derive_seed(uint64_t base, uint64_t iteration, uint64_t stage) {
  uint64_t x = base + 0x9E3779B97F4A7C15ull * (iteration * 7u + stage + 1u);
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ull;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBull;
  x ^= x >> 31;
  return x;
}

Rotation rot_x(double a) { return Rotation::from_axis_angle(Vec3::UnitX(), a); }
Rotation rot_y(double a) { return Rotation::from_axis_angle(Vec3::UnitY(), a); }

}  // namespace

ObjectModel build_object_model(const RunConfig& config) {
  if (config.object_shape == "box") {
    std::vector<Rotation> stable = {Rotation::identity(), rot_x(M_PI),
                                    rot_x(M_PI / 2), rot_x(-M_PI / 2),
                                    rot_y(M_PI / 2), rot_y(-M_PI / 2)};
    return ObjectModel(1, "box", make_box(config.box_extents),
                       SymmetryGroup::box(config.box_extents), std::move(stable));
  }
  if (config.object_shape == "cylinder") {
    // Upright both ways plus lying on the side.
    std::vector<Rotation> stable = {Rotation::identity(), rot_x(M_PI), rot_x(M_PI / 2)};
    return ObjectModel(1, "cylinder",
                       make_cylinder(config.cylinder_radius, config.cylinder_height),
                       SymmetryGroup::cylinder_z(), std::move(stable));
  }
  if (config.object_shape == "lshape") {
    std::vector<Rotation> stable = {Rotation::identity(), rot_x(M_PI), rot_y(M_PI / 2)};
    return ObjectModel(1, "lshape",
                       make_l_shape(config.lshape_dims.x(), config.lshape_dims.y(),
                                    config.lshape_dims.z()),
                       SymmetryGroup::trivial(), std::move(stable));
  }
  throw ConfigError("unknown object_shape: " + config.object_shape);
}

// ---------------------------------------------------------------------------
// Bin generation

BinScene generate_bin(const ObjectModel& model, int target_count, const BinSpec& spec,
                      uint64_t seed) {
  if (target_count < 0) throw std::invalid_argument("generate_bin: count must be >= 0");

  BinScene scene;
  scene.spec = spec;
  scene.bin_mesh = std::make_shared<TriangleMesh>(make_open_bin(spec.interior, spec.wall_thickness));
  scene.bin_bvh = std::make_shared<Bvh>(*scene.bin_mesh);
  {
    TriangleMesh table = make_box(Vec3(4.0 * spec.interior.x(), 4.0 * spec.interior.y(), 0.020));
    table = table.transformed(Pose(Rotation::identity(), Vec3(0, 0, -spec.wall_thickness - 0.010)));
    scene.table_mesh = std::make_shared<TriangleMesh>(std::move(table));
    scene.table_bvh = std::make_shared<Bvh>(*scene.table_mesh);
  }
  scene.initial_fill = 0;
  if (target_count == 0) return scene;

  const double hx = spec.interior.x() / 2, hy = spec.interior.y() / 2;
  constexpr double kCell = 0.005;
  constexpr double kLift = 0.0005;  // settle gap; keeps contacts resolvable
  const int gx = std::max(1, int(std::ceil(spec.interior.x() / kCell)));
  const int gy = std::max(1, int(std::ceil(spec.interior.y() / kCell)));
  std::vector<double> height(size_t(gx) * gy, 0.0);  // above the interior floor

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto& stable = model.stable_orientations();

  // Cached rotated-mesh AABBs for each stable orientation at yaw 0 would
  // still depend on yaw; transform per attempt instead (meshes are small).
  bool any_fits = false;
  const int budget = 250 * target_count;
  struct Placed {
    TriangleMesh mesh;  // bin-local
    Bvh bvh;
    Aabb box;
  };
  std::vector<Placed> placed;

  for (int attempt = 0; attempt < budget && int(scene.instances.size()) < target_count;
       ++attempt) {
    const Rotation base = stable.empty() ? Rotation::identity()
                                         : stable[size_t(unit(rng) * double(stable.size())) %
                                                  stable.size()];
    const double yaw = unit(rng) * 2.0 * M_PI;
    const Rotation rot = Rotation::from_axis_angle(Vec3::UnitZ(), yaw) * base;

    TriangleMesh rotated = model.mesh().transformed(Pose(rot, Vec3::Zero()));
    const Aabb rb = rotated.aabb();
    const double fx = (rb.hi.x() - rb.lo.x()) / 2, fy = (rb.hi.y() - rb.lo.y()) / 2;
    if (fx >= hx || fy >= hy) continue;  // does not fit at this yaw
    any_fits = true;

    const double cx = -hx + fx + unit(rng) * 2.0 * (hx - fx);
    const double cy = -hy + fy + unit(rng) * 2.0 * (hy - fy);
    const Vec3 foot_center((rb.lo.x() + rb.hi.x()) / 2, (rb.lo.y() + rb.hi.y()) / 2, 0);

    // Support height = max height-map value under the footprint.
    const int x0 = std::clamp(int((cx - fx + hx) / kCell), 0, gx - 1);
    const int x1 = std::clamp(int((cx + fx + hx) / kCell), 0, gx - 1);
    const int y0 = std::clamp(int((cy - fy + hy) / kCell), 0, gy - 1);
    const int y1 = std::clamp(int((cy + fy + hy) / kCell), 0, gy - 1);
    double support = 0.0;
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) support = std::max(support, height[size_t(y) * gx + x]);

    const double tz = support + kLift - rb.lo.z();
    if (tz + rb.hi.z() - rb.lo.z() > 2.0 * spec.interior.z()) continue;  // pile too tall
    const Vec3 t(cx - foot_center.x(), cy - foot_center.y(), tz);

    TriangleMesh local = rotated.transformed(Pose(Rotation::identity(), t));
    Bvh local_bvh(local);
    const Aabb lb = local.aabb();

    bool collides = false;
    for (const auto& p : placed) {
      if (!p.box.overlaps(lb)) continue;
      if (meshes_intersect(p.bvh, Pose::identity(), local_bvh, Pose::identity())) {
        collides = true;
        break;
      }
    }
    if (collides) continue;

    BinInstance inst;
    inst.id = int(scene.instances.size());
    inst.class_id = model.class_id();
    inst.pose = spec.pose * Pose(rot, t);
    scene.instances.push_back(inst);

    const double top = lb.hi.z();
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x)
        height[size_t(y) * gx + x] = std::max(height[size_t(y) * gx + x], top);
    placed.push_back({std::move(local), std::move(local_bvh), lb});
  }

  if (!any_fits) throw FillFailure("generate_bin: object footprint larger than the bin interior");
  scene.initial_fill = int(scene.instances.size());
  scene.fill_incomplete = scene.initial_fill < target_count;
  return scene;
}

// ---------------------------------------------------------------------------
// Viewpoints

namespace {

Pose look_at(const Vec3& eye, const Vec3& target) {
  Vec3 f = (target - eye).normalized();  // camera +z
  const Vec3 hint = std::abs(f.z()) > 0.99 ? Vec3::UnitX() : Vec3::UnitZ();
  Vec3 x = hint.cross(f).normalized();
  Vec3 y = f.cross(x);
  Mat3 m;
  m.col(0) = x;
  m.col(1) = y;
  m.col(2) = f;
  return Pose(Rotation(m), eye);
}

bool viewpoint_reachable(const Pose& pose, const ReachModel& reach) {
  const double r = (pose.translation - reach.base).norm();
  if (r < reach.r_min || r > reach.r_max) return false;
  const Vec3 f = pose.rotation * Vec3::UnitZ();
  const double tilt = std::acos(std::clamp(-f.z(), -1.0, 1.0));  // vs straight down
  return tilt <= reach.max_tilt;
}

}  // namespace

ViewpointPlan plan_viewpoints(const Pose& bin_pose, double radius, int n_samples,
                              const ReachModel& reach) {
  if (radius <= 0) throw std::invalid_argument("plan_viewpoints: radius must be > 0");
  const Vec3 center = bin_pose.translation;

  std::vector<Pose> candidates;
  candidates.push_back(look_at(center + Vec3(0, 0, radius), center));  // declared start
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n_samples; ++i) {
    const double z = 1.0 - (i + 0.5) / double(n_samples);  // cos(polar), top first
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    const Vec3 dir(r * std::cos(phi), r * std::sin(phi), z);
    candidates.push_back(look_at(center + radius * dir, center));
  }

  std::vector<Pose> reachable;
  for (const auto& p : candidates)
    if (viewpoint_reachable(p, reach)) reachable.push_back(p);
  if (reachable.empty()) throw NoReachableViewpoint("plan_viewpoints: no reachable viewpoint");

  // Greedy farthest-point ordering over viewing directions, seeded with the
  // first reachable candidate (top-down when it is reachable).
  std::vector<Pose> ordered;
  std::vector<bool> used(reachable.size(), false);
  ordered.push_back(reachable[0]);
  used[0] = true;
  auto dir_of = [&](const Pose& p) { return (p.translation - center).normalized(); };
  while (ordered.size() < reachable.size()) {
    int best = -1;
    double best_gap = -1.0;
    for (size_t i = 0; i < reachable.size(); ++i) {
      if (used[i]) continue;
      double gap = std::numeric_limits<double>::infinity();
      for (const auto& sel : ordered) {
        const double a =
            std::acos(std::clamp(dir_of(reachable[i]).dot(dir_of(sel)), -1.0, 1.0));
        gap = std::min(gap, a);
      }
      if (gap > best_gap) {
        best_gap = gap;
        best = int(i);
      }
    }
    ordered.push_back(reachable[best]);
    used[best] = true;
  }
  return {std::move(ordered)};
}

// ---------------------------------------------------------------------------
// Grasp execution

const char* to_string(ExecStatus s) {
  switch (s) {
    case ExecStatus::success: return "success";
    case ExecStatus::fail_empty: return "fail_empty";
    case ExecStatus::fail_slip: return "fail_slip";
  }
  return "?";
}

ExecResult simulate_grasp_execution(const GraspTrajectory& trajectory, const RankedGrasp& grasp,
                                    BinScene& scene, const std::map<int, ObjectModel>& models,
                                    const GripperModel& gripper,
                                    const VerificationConfig& config, uint64_t seed) {
  if (config.epsilon <= 0) throw std::invalid_argument("verification epsilon must be > 0");
  const Pose& ee = trajectory.waypoints.empty() ? grasp.world_from_ee
                                                : trajectory.waypoints[trajectory.grasp_index].pose;
  const Vec3 stroke = ee.rotation * gripper.stroke_axis();
  const double half = gripper.max_opening() / 2;
  const Vec3 seg_origin = ee.translation - half * stroke;

  // True closure: intersect the finger-closing segment with every
  // ground-truth instance and keep the one contacted first.
  struct Contact {
    double s;  // param along the segment, meters
    Vec3 normal;
  };
  int hit_instance = -1;
  std::vector<Contact> contacts;
  for (const auto& inst : scene.instances) {
    const auto& model = models.at(inst.class_id);
    const Pose obj_from_world = inst.pose.inverse();
    const Vec3 o = obj_from_world * seg_origin;
    const Vec3 d = obj_from_world.rotation * stroke;
    std::vector<Contact> local;
    double s0 = 0.0;
    while (s0 < gripper.max_opening()) {
      auto hit = model.bvh().raycast(o, d, s0 + kRayEpsilon, gripper.max_opening());
      if (!hit) break;
      local.push_back({hit->distance, (inst.pose.rotation * hit->normal).normalized()});
      s0 = hit->distance;
    }
    if (local.empty()) continue;
    if (hit_instance < 0 || local.front().s < contacts.front().s) {
      hit_instance = inst.id;
      contacts = std::move(local);
    }
  }

  ExecResult result;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  auto perturb_instance = [&](int id) {
    for (auto& inst : scene.instances) {
      if (inst.id != id) continue;
      const Vec3 dt(config.disturb_translation * sym(rng), config.disturb_translation * sym(rng),
                    0.0);
      const Vec3 axis = Vec3(sym(rng), sym(rng), sym(rng) * 0.2);
      const double angle = config.disturb_rotation * sym(rng);
      const Rotation dr = axis.norm() > 1e-9 ? Rotation::from_axis_angle(axis, angle)
                                             : Rotation::identity();
      inst.pose = Pose(dr, dt) * inst.pose;
      return;
    }
  };

  if (hit_instance < 0 || contacts.size() < 2) {
    // Fingers closed fully (or nicked a single surface): nothing held.
    result.status = ExecStatus::fail_empty;
    result.finger_distance = 0.0;
    if (hit_instance >= 0) perturb_instance(hit_instance);
    return result;
  }

  const Contact& first = contacts.front();
  const Contact& last = contacts.back();
  result.finger_distance = last.s - first.s;
  if (result.finger_distance < config.epsilon) {
    result.status = ExecStatus::fail_empty;
    perturb_instance(hit_instance);
    return result;
  }

  // Slip: contact normals must sit inside the friction cone about the
  // closing axis (the paper's stall-velocity check has no sim analogue).
  const double dev1 = std::acos(std::clamp(std::abs(first.normal.dot(stroke)), 0.0, 1.0));
  const double dev2 = std::acos(std::clamp(std::abs(last.normal.dot(stroke)), 0.0, 1.0));
  if (std::max(dev1, dev2) > config.friction_cone_half) {
    result.status = ExecStatus::fail_slip;
    perturb_instance(hit_instance);
    return result;
  }

  result.status = ExecStatus::success;
  result.picked_instance = hit_instance;
  std::erase_if(scene.instances, [&](const BinInstance& i) { return i.id == hit_instance; });
  return result;
}

// ---------------------------------------------------------------------------
// Config

RunConfig RunConfig::from_toml(const TomlDoc& doc) {
  RunConfig c;
  c.seed = uint64_t(doc.get_int("run.seed", 1));
  c.max_iterations = int(doc.get_int("run.max_iterations", 1000));
  c.duration_budget = doc.get_double("run.duration_budget", c.duration_budget);
  c.memory = doc.get_bool("run.memory", true);
  c.depth_preset = doc.get_string("run.depth_preset", "enhanced");
  c.dump_voxels = doc.get_bool("run.dump_voxels", false);
  c.grasp_db_path = doc.get_string("run.grasp_db", "");

  c.object_shape = doc.get_string("scene.object_shape", "box");
  auto v3 = [&](const std::string& key, const Vec3& fb) {
    auto v = doc.get_doubles(key, {fb.x(), fb.y(), fb.z()});
    if (v.size() != 3) throw ConfigError(key + " must hold 3 values");
    return Vec3(v[0], v[1], v[2]);
  };
  c.box_extents = v3("scene.box_extents", c.box_extents);
  c.cylinder_radius = doc.get_double("scene.cylinder_radius", c.cylinder_radius);
  c.cylinder_height = doc.get_double("scene.cylinder_height", c.cylinder_height);
  c.lshape_dims = v3("scene.lshape_dims", c.lshape_dims);
  c.fill_count = int(doc.get_int("scene.fill_count", c.fill_count));
  c.bin.interior = v3("scene.bin_interior", c.bin.interior);
  c.bin.wall_thickness = doc.get_double("scene.wall_thickness", c.bin.wall_thickness);

  c.camera.fx = doc.get_double("camera.fx", c.camera.fx);
  c.camera.fy = doc.get_double("camera.fy", c.camera.fy);
  c.camera.cx = doc.get_double("camera.cx", c.camera.cx);
  c.camera.cy = doc.get_double("camera.cy", c.camera.cy);
  c.camera.width = int(doc.get_int("camera.width", c.camera.width));
  c.camera.height = int(doc.get_int("camera.height", c.camera.height));
  c.sensor_distance = doc.get_double("camera.sensor_distance", c.sensor_distance);
  c.viewpoint_samples = int(doc.get_int("camera.viewpoint_samples", c.viewpoint_samples));

  const double deg = M_PI / 180.0;
  c.noise.sigma_rot = doc.get_double("noise.sigma_rot_deg", c.noise.sigma_rot / deg) * deg;
  c.noise.sigma_trans = doc.get_double("noise.sigma_trans", c.noise.sigma_trans);
  c.noise.p_detect = doc.get_double("noise.p_detect", c.noise.p_detect);
  c.noise.p_sym = doc.get_double("noise.p_sym", c.noise.p_sym);
  c.noise.p_rear = doc.get_double("noise.p_rear", c.noise.p_rear);
  c.noise.detectability_threshold =
      doc.get_double("noise.detectability_threshold", c.noise.detectability_threshold);
  c.rejection_margin = doc.get_double("noise.rejection_margin", c.rejection_margin);

  c.buffer.theta_thresh =
      doc.get_double("buffer.theta_thresh_deg", c.buffer.theta_thresh / deg) * deg;
  c.buffer.delta_thresh = doc.get_double("buffer.delta_thresh", c.buffer.delta_thresh);
  c.buffer.min_observations = int(doc.get_int("buffer.min_observations", c.buffer.min_observations));
  c.buffer.stale_after = int(doc.get_int("buffer.stale_after", c.buffer.stale_after));
  c.buffer.confidence_weighting =
      doc.get_bool("buffer.confidence_weighting", c.buffer.confidence_weighting);

  c.carve.assoc_tolerance = doc.get_double("carve.assoc_tolerance", c.carve.assoc_tolerance);
  c.carve.min_points_per_voxel =
      int(doc.get_int("carve.min_points_per_voxel", c.carve.min_points_per_voxel));
  c.voxel_resolution = doc.get_double("carve.voxel_resolution", c.voxel_resolution);

  c.gripper.max_opening = doc.get_double("gripper.max_opening", c.gripper.max_opening);
  c.gripper.finger_length = doc.get_double("gripper.finger_length", c.gripper.finger_length);
  c.gripper.finger_thickness =
      doc.get_double("gripper.finger_thickness", c.gripper.finger_thickness);
  c.gripper.finger_width = doc.get_double("gripper.finger_width", c.gripper.finger_width);
  c.gripper.palm_height = doc.get_double("gripper.palm_height", c.gripper.palm_height);
  c.gripper.palm_lateral = doc.get_double("gripper.palm_lateral", c.gripper.palm_lateral);

  c.grasp_gen.target_pairs = int(doc.get_int("grasp_gen.target_pairs", c.grasp_gen.target_pairs));
  c.grasp_gen.antipodal_tolerance =
      doc.get_double("grasp_gen.antipodal_tolerance_deg", c.grasp_gen.antipodal_tolerance / deg) *
      deg;
  c.grasp_gen.approach_samples =
      int(doc.get_int("grasp_gen.approach_samples", c.grasp_gen.approach_samples));
  c.grasp_gen.seed = uint64_t(doc.get_int("grasp_gen.seed", int64_t(c.grasp_gen.seed)));
  c.grasp_gen.budget_factor = int(doc.get_int("grasp_gen.budget_factor", c.grasp_gen.budget_factor));
  c.grasp_gen.finger_clearance =
      doc.get_double("grasp_gen.finger_clearance", c.grasp_gen.finger_clearance);

  c.planner.shortlist_fraction =
      doc.get_double("planner.shortlist_fraction", c.planner.shortlist_fraction);
  c.planner.weights.align = doc.get_double("planner.w_align", c.planner.weights.align);
  c.planner.weights.yaw = doc.get_double("planner.w_yaw", c.planner.weights.yaw);
  c.planner.weights.conf = doc.get_double("planner.w_conf", c.planner.weights.conf);
  c.planner.weights.height = doc.get_double("planner.w_height", c.planner.weights.height);
  c.planner.reach.base = v3("planner.reach_base", c.planner.reach.base);
  c.planner.reach.r_min = doc.get_double("planner.reach_r_min", c.planner.reach.r_min);
  c.planner.reach.r_max = doc.get_double("planner.reach_r_max", c.planner.reach.r_max);
  c.planner.reach.max_tilt =
      doc.get_double("planner.max_tilt_deg", c.planner.reach.max_tilt / deg) * deg;
  c.planner.motion.pre_grasp_offset =
      doc.get_double("motion.pre_grasp_offset", c.planner.motion.pre_grasp_offset);
  c.planner.motion.retreat_clearance =
      doc.get_double("motion.retreat_clearance", c.planner.motion.retreat_clearance);
  c.planner.motion.lift_margin = doc.get_double("motion.lift_margin", c.planner.motion.lift_margin);
  c.planner.motion.sweep_step = doc.get_double("motion.sweep_step", c.planner.motion.sweep_step);
  c.planner.motion.voxel_budget =
      size_t(doc.get_int("motion.voxel_budget", int64_t(c.planner.motion.voxel_budget)));
  c.planner.motion.speed = doc.get_double("motion.speed", c.planner.motion.speed);
  c.planner.motion.accel = doc.get_double("motion.accel", c.planner.motion.accel);

  c.verification.epsilon = doc.get_double("verification.epsilon", c.verification.epsilon);
  c.verification.friction_cone_half =
      doc.get_double("verification.friction_cone_deg", c.verification.friction_cone_half / deg) *
      deg;
  c.verification.disturb_translation =
      doc.get_double("verification.disturb_translation", c.verification.disturb_translation);
  c.verification.disturb_rotation =
      doc.get_double("verification.disturb_rotation_deg",
                     c.verification.disturb_rotation / deg) *
      deg;

  c.durations.acquisition = doc.get_double("durations.acquisition", c.durations.acquisition);
  c.durations.perception = doc.get_double("durations.perception", c.durations.perception);
  c.durations.planning = doc.get_double("durations.planning", c.durations.planning);
  c.durations.motion_grasp = doc.get_double("durations.motion_grasp", c.durations.motion_grasp);
  c.durations.motion_release =
      doc.get_double("durations.motion_release", c.durations.motion_release);

  c.camera.validate();
  c.buffer.validate();
  c.grasp_gen.validate();
  if (c.duration_budget < 0) throw ConfigError("run.duration_budget must be >= 0");
  if (c.durations.acquisition < 0 || c.durations.perception < 0 || c.durations.planning < 0 ||
      c.durations.motion_grasp < 0 || c.durations.motion_release < 0)
    throw ConfigError("durations must be >= 0");
  return c;
}

RunConfig RunConfig::from_toml_file(const std::string& path) {
  return from_toml(TomlDoc::parse_file(path));
}

GraspDatabase load_or_generate_db(const RunConfig& config, const ObjectModel& model,
                                  const GripperModel& gripper) {
  if (!config.grasp_db_path.empty()) {
    GraspDatabase db = read_db(config.grasp_db_path);
    if (db.class_id != model.class_id())
      throw ConfigError("grasp database class id does not match the scene object");
    return db;
  }
  return generate_grasp_db(model, gripper, config.grasp_gen);
}

// ---------------------------------------------------------------------------
// Run loop

namespace {

nlohmann::ordered_json pose_json(const Pose& p) {
  const auto v = p.serialize();
  return nlohmann::ordered_json(v);
}

}  // namespace

void write_metrics_csv(const RunMetrics& metrics, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "bucket_start_s,iterations,attempts,successes,early_exits,sr,eer\n";
  char line[256];
  for (const auto& b : metrics.buckets) {
    const double sr = b.attempts > 0 ? double(b.successes) / b.attempts : 0.0;
    const double eer = b.iterations > 0 ? double(b.early_exits) / b.iterations : 0.0;
    std::snprintf(line, sizeof line, "%.0f,%d,%d,%d,%d,%.6f,%.6f\n", b.start, b.iterations,
                  b.attempts, b.successes, b.early_exits, sr, eer);
    out << line;
  }
  const double sr = metrics.sr().value_or(0.0);
  std::snprintf(line, sizeof line, "total,%d,%d,%d,%d,%.6f,%.6f\n", metrics.iterations,
                metrics.attempts, metrics.successes, metrics.early_exits, sr, metrics.eer());
  out << line;
  std::snprintf(line, sizeof line, "elapsed_s,%.3f\nmpph,%.3f\n", metrics.elapsed, metrics.mpph());
  out << line;
}

RunResult run_simulation(const RunConfig& config, const std::string& out_dir) {
  const ObjectModel model = build_object_model(config);
  const GripperModel gripper(config.gripper);
  std::map<int, GraspDatabase> dbs;
  dbs.emplace(model.class_id(), load_or_generate_db(config, model, gripper));
  std::map<int, ObjectModel> models;
  models.emplace(model.class_id(), model);

  BinScene scene = generate_bin(model, config.fill_count, config.bin, derive_seed(config.seed, 0, 0));

  PlannerConfig planner = config.planner;
  planner.bin.principal_axis = (config.bin.pose.rotation * Vec3::UnitX()).normalized();
  planner.bin.floor_z = config.bin.pose.translation.z();
  planner.bin.top_z = planner.bin.floor_z + config.bin.interior.z();

  const ViewpointPlan viewpoints =
      plan_viewpoints(config.bin.pose, config.sensor_distance, config.viewpoint_samples,
                      planner.reach);

  const DepthNoisePreset preset = DepthNoisePreset::by_name(config.depth_preset);
  PoseNoiseModel noise = config.noise;
  noise.sigma_rot *= preset.pose_noise_scale;
  noise.sigma_trans *= preset.pose_noise_scale;

  PoseBuffer buffer(config.buffer);
  buffer.register_class(model.class_id(), model.symmetry());

  // Voxel grid covering the bin interior plus a margin around the walls.
  const Vec3 bin_lo = config.bin.pose.translation -
                      Vec3(config.bin.interior.x() / 2 + 0.02, config.bin.interior.y() / 2 + 0.02,
                           0.01);
  const Vec3 grid_span(config.bin.interior.x() + 0.04, config.bin.interior.y() + 0.04,
                       config.bin.interior.z() + 0.06);
  const VoxelGrid grid_spec(bin_lo, config.voxel_resolution,
                            (grid_span / config.voxel_resolution).array().ceil().cast<int>().matrix());

  std::ofstream events;
  RunResult result;
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    result.events_path = out_dir + "/events.jsonl";
    result.metrics_path = out_dir + "/metrics.csv";
    events.open(result.events_path);
    if (!events) throw std::runtime_error("cannot open " + result.events_path);
  }

  RunMetrics& m = result.metrics;
  double pending_motion = 0.0;  // motion carried from the previous iteration
  size_t vp_index = 0;

  for (int it = 0; it < config.max_iterations; ++it) {
    if (m.elapsed >= config.duration_budget) break;
    if (scene.instances.empty()) break;

    const Pose camera_pose = viewpoints.poses[vp_index % viewpoints.poses.size()];
    ++vp_index;  // eye-in-hand: fresh viewpoint every acquisition

    // --- acquire ---
    std::vector<RenderItem> items;
    for (const auto& inst : scene.instances)
      items.push_back({&models.at(inst.class_id).bvh(), inst.pose, inst.id});
    for (const auto& s : scene.statics()) items.push_back({s.bvh, s.pose, -1});
    const RenderResult truth = render_scene(items, camera_pose, config.camera);
    const DepthImage depth =
        corrupt_depth(truth.depth, truth.incidence, preset, derive_seed(config.seed, it, 1));

    // --- perceive ---
    std::vector<SceneObjectView> views;
    for (const auto& inst : scene.instances)
      views.push_back({inst.id, &models.at(inst.class_id), inst.pose});
    std::vector<PoseEstimate> estimates =
        emit_pose_estimates(views, camera_pose, config.camera, truth, depth, noise, preset,
                            derive_seed(config.seed, it, 2), it);

    int rejected = 0;
    std::vector<WorldEstimate> world;
    for (const auto& est : estimates) {
      if (!rejection_filter_keep(est, config.camera, config.rejection_margin)) {
        ++rejected;
        continue;
      }
      world.push_back({est.class_id, camera_pose * est.pose, est.confidence, est.truth_id});
    }

    // --- fuse ---
    SceneState state;
    state.iteration = it;
    state.statics = scene.statics();
    if (config.memory) {
      buffer.ingest(world, it);
      buffer.invalidate(it, [&](const TrackedObject& track) {
        const Vec3 cam = (camera_pose.inverse() * track.fused.translation);
        if (cam.z() <= 0.05) return false;
        const Eigen::Vector2d px = config.camera.project(cam);
        return px.x() >= 0 && px.x() < config.camera.width && px.y() >= 0 &&
               px.y() < config.camera.height;
      });
      for (const auto& v : buffer.validated_poses(it))
        state.targets.push_back({v.track_id, model, v.pose, v.confidence, v.truth_id});
    } else {
      // Memory ablation: every filtered estimate is immediately a target.
      int next = 0;
      for (const auto& w : world)
        state.targets.push_back({next++, model, w.pose, w.confidence, w.truth_id});
    }

    const std::vector<Vec3> points = depth_to_points(depth, config.camera, camera_pose);
    std::vector<PosedMesh> target_meshes;
    for (const auto& t : state.targets) target_meshes.push_back({&t.model.bvh(), t.pose});
    state.voxels = classify_and_carve(points, target_meshes, state.statics, config.carve, grid_spec);
    if (config.dump_voxels && !out_dir.empty())
      dump_voxel_grid(state.voxels, out_dir + "/voxels_" + std::to_string(it));

    // --- plan ---
    const PlanOutcome outcome = plan(state, dbs, gripper, planner);

    // Masked time: this iteration's compute hides behind the motion still
    // pending from the previous one.
    const double step = masked_time_step(config.durations, pending_motion);
    const size_t bucket = size_t(m.elapsed / 300.0);
    if (m.buckets.size() <= bucket) {
      m.buckets.resize(bucket + 1);
      m.buckets[bucket].start = double(bucket) * 300.0;
    }
    m.elapsed += step;
    ++m.iterations;
    ++m.buckets[bucket].iterations;

    nlohmann::ordered_json ev;
    ev["iteration"] = it;
    ev["time"] = m.elapsed;
    ev["viewpoint"] = pose_json(camera_pose);
    ev["estimates"] = int(estimates.size());
    ev["rejected"] = rejected;
    ev["targets"] = int(state.targets.size());
    ev["occupied_voxels"] = state.voxels.occupied_count();

    if (!outcome.planned) {
      ++m.early_exits;
      ++m.buckets[bucket].early_exits;
      pending_motion = 0.0;  // re-acquisition only, no motion issued
      ev["early_exit"] = outcome.early_exit == EarlyExitReason::no_targets ? "no_targets"
                                                                           : "no_feasible";
    } else {
      ++m.attempts;
      ++m.buckets[bucket].attempts;
      pending_motion = config.durations.motion_time();
      const ExecResult exec =
          simulate_grasp_execution(outcome.trajectory, outcome.grasp, scene, models, gripper,
                                   config.verification, derive_seed(config.seed, it, 3));
      if (exec.status == ExecStatus::success) {
        ++m.successes;
        ++m.buckets[bucket].successes;
        if (config.memory) buffer.remove_track(outcome.grasp.track_id);
      }
      ev["attempt"] = {{"track", outcome.grasp.track_id},
                       {"score", outcome.grasp.score},
                       {"result", to_string(exec.status)},
                       {"finger_distance", exec.finger_distance},
                       {"picked", exec.picked_instance}};
    }
    ev["successes"] = m.successes;
    ev["remaining"] = int(scene.instances.size());
    if (events) events << ev.dump() << "\n";
  }

  if (!out_dir.empty()) write_metrics_csv(m, result.metrics_path);
  return result;
}

}  // namespace binpick
