#include "binpick/grasp_gen.hpp"
#include "binpick/primitives.hpp"

#include <doctest.h>

#include <cstdio>

using namespace binpick;

namespace {

ObjectModel cylinder_model() {
  return ObjectModel(2, "cyl", make_cylinder(0.012, 0.048, 64), SymmetryGroup::cylinder_z());
}

ObjectModel box_model() {
  const Vec3 ext(0.04, 0.03, 0.016);
  return ObjectModel(1, "box", make_box(ext), SymmetryGroup::box(ext));
}

}  // namespace

TEST_CASE("antipodal pairs satisfy the tolerance and width bounds") {
  const ObjectModel model = box_model();
  const GripperModel gripper;
  GraspGenConfig config;
  config.target_pairs = 48;
  config.seed = 5;
  const auto result = sample_antipodal_pairs(model.mesh(), model.bvh(), gripper, config);
  REQUIRE(!result.pairs.empty());
  for (const auto& pair : result.pairs) {
    CHECK(pair.angle_error <= config.antipodal_tolerance + 1e-12);
    const Vec3 d = pair.c2 - pair.c1;
    CHECK(d.norm() <= gripper.max_opening() + 1e-12);
    // Normals oppose the closing direction within tolerance.
    const Vec3 dir = d.normalized();
    CHECK(std::acos(std::clamp(-pair.n1.dot(dir), -1.0, 1.0)) <=
          config.antipodal_tolerance + 1e-9);
    CHECK(std::acos(std::clamp(pair.n2.dot(dir), -1.0, 1.0)) <=
          config.antipodal_tolerance + 1e-9);
  }
}

TEST_CASE("cylinder grasp widths equal the diameter up to chord error") {
  const ObjectModel model = cylinder_model();
  const GripperModel gripper;
  GraspGenConfig config;
  config.target_pairs = 32;
  config.seed = 9;
  const GraspDatabase db = generate_grasp_db(model, gripper, config);
  REQUIRE(!db.candidates.empty());
  const double chord_err = 0.012 * (1.0 - std::cos(M_PI / 64));  // tessellation sagitta
  int side_grasps = 0;
  for (const auto& c : db.candidates) {
    // Side grasps close across the barrel; their width is the diameter.
    const Vec3 d = c.contact2 - c.contact1;
    if (std::abs(d.normalized().z()) < 0.2) {
      ++side_grasps;
      CHECK(c.width == doctest::Approx(2 * 0.012).epsilon(0.05));
      CHECK(std::abs(c.width - 2 * 0.012) <= 2 * chord_err + 1e-6);
    }
  }
  CHECK(side_grasps > 0);
}

TEST_CASE("frames span the approach fan and keep +z toward the object") {
  AntipodalPair pair;
  pair.c1 = Vec3(-0.02, 0, 0);
  pair.n1 = Vec3(-1, 0, 0);
  pair.c2 = Vec3(0.02, 0, 0);
  pair.n2 = Vec3(1, 0, 0);
  pair.angle_error = 0.0;
  GraspGenConfig config;
  config.approach_samples = 8;
  const Vec3 center = Vec3::Zero();
  const auto frames = define_frames(pair, center, config);
  REQUIRE(!frames.empty());
  CHECK(frames.size() <= size_t(config.approach_samples));
  const Vec3 mid = 0.5 * (pair.c1 + pair.c2);
  for (const auto& f : frames) {
    // ee origin at the contact midpoint.
    CHECK((f.obj_from_ee.translation - mid).norm() < 1e-9);
    // +y (stroke) aligned with the closing line.
    const Vec3 stroke = f.obj_from_ee.rotation * Vec3::UnitY();
    CHECK(std::abs(std::abs(stroke.dot(Vec3::UnitX())) - 1.0) < 1e-9);
    // Outward rule: approach +z points from outside toward the object.
    const Vec3 approach = f.obj_from_ee.rotation * Vec3::UnitZ();
    CHECK(approach.dot(center - (mid - 0.1 * approach)) >= -1e-9);
    CHECK(f.width == doctest::Approx(0.04));
  }
}

TEST_CASE("degenerate pair is rejected") {
  AntipodalPair pair;
  pair.c1 = pair.c2 = Vec3(0.01, 0, 0);  // coincident contacts
  pair.n1 = Vec3(-1, 0, 0);
  pair.n2 = Vec3(1, 0, 0);
  CHECK_THROWS_AS(define_frames(pair, Vec3::Zero(), GraspGenConfig{}), DegeneratePair);
}

TEST_CASE("collision filter removes hull-intersecting candidates (brute-force check)") {
  const ObjectModel model = box_model();
  const GripperModel gripper;
  GraspGenConfig config;
  config.target_pairs = 32;
  config.seed = 21;
  const GraspDatabase db = generate_grasp_db(model, gripper, config);
  REQUIRE(!db.candidates.empty());
  for (const auto& c : db.candidates) {
    // Rebuild the finger/palm assembly at the candidate width and verify
    // against the mesh with the all-pairs triangle oracle.
    for (const auto& [bvh, body_pose] : gripper.assembly_at(c.width, 0.002)) {
      const Pose world = c.obj_from_ee * body_pose;
      const TriangleMesh posed = bvh->mesh().transformed(world);
      bool hit = false;
      for (size_t i = 0; i < posed.triangle_count() && !hit; ++i)
        for (size_t j = 0; j < model.mesh().triangle_count() && !hit; ++j)
          hit = triangles_intersect(posed.triangle(i), model.mesh().triangle(j));
      CHECK_FALSE(hit);
    }
  }
}

TEST_CASE("grasp database round-trips and version-checks") {
  const ObjectModel model = box_model();
  GraspGenConfig config;
  config.target_pairs = 16;
  config.seed = 33;
  const GraspDatabase db = generate_grasp_db(model, GripperModel(), config);
  write_db(db, "/tmp/grasp_db_test.json");
  const GraspDatabase back = read_db("/tmp/grasp_db_test.json");
  CHECK(back.class_id == db.class_id);
  CHECK(back.frame_convention == db.frame_convention);
  REQUIRE(back.candidates.size() == db.candidates.size());
  for (size_t i = 0; i < db.candidates.size(); ++i) {
    CHECK(back.candidates[i].obj_from_ee.approx_equal(db.candidates[i].obj_from_ee, 1e-12, 1e-12));
    CHECK(back.candidates[i].width == doctest::Approx(db.candidates[i].width).epsilon(1e-12));
  }

  // Tampered version must be refused.
  {
    std::FILE* f = std::fopen("/tmp/grasp_db_bad.json", "w");
    std::fputs("{\"format_version\": 99, \"class_id\": 1, \"candidates\": []}", f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(read_db("/tmp/grasp_db_bad.json"), VersionMismatch);
}

TEST_CASE("generation is deterministic per seed") {
  const ObjectModel model = box_model();
  GraspGenConfig config;
  config.target_pairs = 24;
  config.seed = 55;
  const GraspDatabase a = generate_grasp_db(model, GripperModel(), config);
  const GraspDatabase b = generate_grasp_db(model, GripperModel(), config);
  REQUIRE(a.candidates.size() == b.candidates.size());
  for (size_t i = 0; i < a.candidates.size(); ++i)
    CHECK(a.candidates[i].obj_from_ee.approx_equal(b.candidates[i].obj_from_ee, 0.0, 0.0));
}

TEST_CASE("impossible object exhausts the budget") {
  // A sphere wider than the gripper opening yields no antipodal pairs.
  const ObjectModel model(3, "big", make_sphere(0.08, 16, 32));
  GraspGenConfig config;
  config.target_pairs = 8;
  config.budget_factor = 10;
  const auto result = sample_antipodal_pairs(model.mesh(), model.bvh(), GripperModel(), config);
  CHECK(result.pairs.empty());
  CHECK(result.budget_exhausted);
}

TEST_CASE("gripper JSON round-trip") {
  {
    std::FILE* f = std::fopen("/tmp/gripper_test.json", "w");
    std::fputs(
        "{\"max_opening\": 0.1, \"finger_length\": 0.06, \"finger_thickness\": 0.008,"
        " \"finger_width\": 0.025, \"palm_height\": 0.04, \"palm_lateral\": 0.035}",
        f);
    std::fclose(f);
  }
  const GripperModel g = GripperModel::from_json_file("/tmp/gripper_test.json");
  CHECK(g.max_opening() == doctest::Approx(0.1));
  CHECK(g.params().finger_length == doctest::Approx(0.06));
}
