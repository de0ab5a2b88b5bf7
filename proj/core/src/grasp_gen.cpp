#include "binpick/grasp_gen.hpp"

#include "binpick/primitives.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>

namespace binpick {

GripperModel::GripperModel(const Params& params) : params_(params) {
  if (params_.max_opening <= 0) throw std::invalid_argument("gripper max_opening must be > 0");
  const double t = params_.finger_thickness, w = params_.finger_width, l = params_.finger_length;
  // +y finger at zero opening: inner face on the y=0 plane, tip at z=0
  TriangleMesh finger = make_box(Vec3(w, t, l));
  for (auto& v : finger.vertices) v += Vec3(0, 0.5 * t, -0.5 * l);
  finger.recompute_normals();
  const double span = params_.max_opening + 2 * t;
  TriangleMesh palm = make_box(Vec3(params_.palm_lateral, span, params_.palm_height));
  for (auto& v : palm.vertices) v += Vec3(0, 0, -l - 0.5 * params_.palm_height);
  palm.recompute_normals();

  finger_mesh_ = std::make_shared<TriangleMesh>(std::move(finger));
  palm_mesh_ = std::make_shared<TriangleMesh>(std::move(palm));
  finger_bvh_ = std::make_shared<Bvh>(*finger_mesh_);
  palm_bvh_ = std::make_shared<Bvh>(*palm_mesh_);
}

GripperModel GripperModel::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open gripper file: " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  Params p;
  p.max_opening = j.value("max_opening", p.max_opening);
  p.finger_length = j.value("finger_length", p.finger_length);
  p.finger_thickness = j.value("finger_thickness", p.finger_thickness);
  p.finger_width = j.value("finger_width", p.finger_width);
  p.palm_height = j.value("palm_height", p.palm_height);
  p.palm_lateral = j.value("palm_lateral", p.palm_lateral);
  return GripperModel(p);
}

std::vector<std::pair<const Bvh*, Pose>> GripperModel::assembly_at(double width,
                                                                   double clearance) const {
  const double half = 0.5 * width + clearance;
  const Rotation flip = Rotation::from_axis_angle(Vec3::UnitZ(), M_PI);
  return {
      {finger_bvh_.get(), Pose(Rotation::identity(), Vec3(0, half, 0))},
      {finger_bvh_.get(), Pose(flip, Vec3(0, -half, 0))},
      {palm_bvh_.get(), Pose::identity()},
  };
}

PairSampleResult sample_antipodal_pairs(const TriangleMesh& mesh, const Bvh& bvh,
                                        const GripperModel& gripper,
                                        const GraspGenConfig& config) {
  config.validate();
  PairSampleResult out;
  const size_t budget = size_t(config.budget_factor) * size_t(config.target_pairs);
  const auto samples = sample_surface(mesh, budget, config.seed);
  for (const auto& s : samples) {
    if (out.pairs.size() >= size_t(config.target_pairs)) return out;
    const Vec3 dir = -s.normal;
    const auto hit = bvh.raycast(s.point, dir, kRayEpsilon);
    if (!hit) continue;
    const Vec3 c2 = hit->point;
    const Vec3 n2 = hit->normal;
    const double width = (c2 - s.point).norm();
    if (width < 10 * kRayEpsilon || width > gripper.max_opening()) continue;
    const double a1 = std::acos(std::clamp(s.normal.dot(-n2), -1.0, 1.0));
    const Vec3 axis = (c2 - s.point) / width;
    const double a2 = std::acos(std::clamp(axis.dot(dir), -1.0, 1.0));
    if (a1 > config.antipodal_tolerance || a2 > config.antipodal_tolerance) continue;
    out.pairs.push_back({s.point, s.normal, c2, n2, std::max(a1, a2)});
  }
  out.budget_exhausted = out.pairs.size() < size_t(config.target_pairs);
  return out;
}

std::vector<GraspCandidate> define_frames(const AntipodalPair& pair, const Vec3& center,
                                          const GraspGenConfig& config) {
  const Vec3 diff = pair.c2 - pair.c1;
  const double width = diff.norm();
  if (width < 1e-12) throw DegeneratePair("define_frames: coincident contacts");
  const Vec3 u = diff / width;  // closing axis
  const Vec3 mid = 0.5 * (pair.c1 + pair.c2);

  // any stable perpendicular seed
  Vec3 seed = std::abs(u.z()) < 0.9 ? u.cross(Vec3::UnitZ()) : u.cross(Vec3::UnitX());
  seed.normalize();

  const Vec3 offset = mid - center;
  std::vector<GraspCandidate> out;
  for (int j = 0; j < config.approach_samples; ++j) {
    const double angle = 2.0 * M_PI * j / config.approach_samples;
    const Vec3 a = Rotation::from_axis_angle(u, angle) * seed;  // outward approach direction
    if (a.dot(offset) < 0.0) continue;  // tie (midpoint == center) keeps every sample
    const Vec3 z_ee = -a;               // toward the object
    const Vec3 y_ee = u;
    const Vec3 x_ee = y_ee.cross(z_ee);
    Mat3 r;
    r.col(0) = x_ee;
    r.col(1) = y_ee;
    r.col(2) = z_ee;
    GraspCandidate c;
    c.obj_from_ee = Pose(Rotation(r), mid);
    c.contact1 = pair.c1;
    c.contact2 = pair.c2;
    c.width = width;
    c.antipodal_error = pair.angle_error;
    out.push_back(c);
  }
  return out;
}

std::vector<GraspCandidate> filter_gripper_collisions(std::span<const GraspCandidate> candidates,
                                                      const Bvh& object,
                                                      const GripperModel& gripper,
                                                      double clearance) {
  std::vector<GraspCandidate> out;
  for (const auto& c : candidates) {
    bool collides = false;
    for (const auto& [bvh, local] : gripper.assembly_at(c.width, clearance)) {
      if (meshes_intersect(object, Pose::identity(), *bvh, c.obj_from_ee * local)) {
        collides = true;
        break;
      }
    }
    if (!collides) out.push_back(c);
  }
  return out;
}

GraspDatabase generate_grasp_db(const ObjectModel& object, const GripperModel& gripper,
                                const GraspGenConfig& config) {
  GraspDatabase db;
  db.class_id = object.class_id();
  db.config = config;
  const auto pairs = sample_antipodal_pairs(object.mesh(), object.bvh(), gripper, config);
  db.budget_exhausted = pairs.budget_exhausted;
  std::vector<GraspCandidate> all;
  for (const auto& pair : pairs.pairs) {
    const auto frames = define_frames(pair, object.center(), config);
    all.insert(all.end(), frames.begin(), frames.end());
  }
  db.candidates = filter_gripper_collisions(all, object.bvh(), gripper, config.finger_clearance);
  return db;
}

namespace {
nlohmann::ordered_json pose_json(const Pose& p) { return p.serialize(); }
nlohmann::ordered_json vec_json(const Vec3& v) { return {v.x(), v.y(), v.z()}; }
Vec3 vec_from(const nlohmann::json& j) {
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}
}  // namespace

void write_db(const GraspDatabase& db, const std::string& path) {
  nlohmann::ordered_json j;
  j["format_version"] = GraspDatabase::kFormatVersion;
  j["class_id"] = db.class_id;
  j["frame_convention"] = db.frame_convention;
  j["config"] = {{"target_pairs", db.config.target_pairs},
                 {"antipodal_tolerance", db.config.antipodal_tolerance},
                 {"approach_samples", db.config.approach_samples},
                 {"seed", db.config.seed},
                 {"budget_factor", db.config.budget_factor},
                 {"finger_clearance", db.config.finger_clearance}};
  j["budget_exhausted"] = db.budget_exhausted;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& c : db.candidates) {
    arr.push_back({{"pose", pose_json(c.obj_from_ee)},
                   {"c1", vec_json(c.contact1)},
                   {"c2", vec_json(c.contact2)},
                   {"width", c.width},
                   {"antipodal_error", c.antipodal_error}});
  }
  j["candidates"] = std::move(arr);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write grasp db: " + path);
  out << j.dump(2) << '\n';
}

GraspDatabase read_db(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open grasp db: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("grasp db: ") + e.what(), size_t(e.byte));
  }
  if (!j.contains("format_version") || j["format_version"] != GraspDatabase::kFormatVersion)
    throw VersionMismatch("grasp db: unsupported format version");
  GraspDatabase db;
  db.class_id = j.value("class_id", -1);
  db.frame_convention = j.value("frame_convention", db.frame_convention);
  const auto& cfg = j["config"];
  db.config.target_pairs = cfg.value("target_pairs", db.config.target_pairs);
  db.config.antipodal_tolerance = cfg.value("antipodal_tolerance", db.config.antipodal_tolerance);
  db.config.approach_samples = cfg.value("approach_samples", db.config.approach_samples);
  db.config.seed = cfg.value("seed", db.config.seed);
  db.config.budget_factor = cfg.value("budget_factor", db.config.budget_factor);
  db.config.finger_clearance = cfg.value("finger_clearance", db.config.finger_clearance);
  db.budget_exhausted = j.value("budget_exhausted", false);
  for (const auto& c : j["candidates"]) {
    GraspCandidate g;
    const auto pv = c["pose"].get<std::vector<double>>();
    g.obj_from_ee = Pose::deserialize(pv);
    g.contact1 = vec_from(c["c1"]);
    g.contact2 = vec_from(c["c2"]);
    g.width = c["width"];
    g.antipodal_error = c["antipodal_error"];
    db.candidates.push_back(g);
  }
  return db;
}

}  // namespace binpick
