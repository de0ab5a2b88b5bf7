#include "binpick/perception.hpp"
#include "binpick/primitives.hpp"

#include <doctest.h>

#include <random>

using namespace binpick;

namespace {

const CameraIntrinsics kCam{140.0, 140.0, 80.0, 60.0, 160, 120};

Pose top_down(double height) {
  Mat3 m;
  m.col(0) = Vec3::UnitX();
  m.col(1) = -Vec3::UnitY();
  m.col(2) = -Vec3::UnitZ();
  return Pose(Rotation(m), Vec3(0, 0, height));
}

struct Fixture {
  ObjectModel model{1, "box", make_box(Vec3(0.04, 0.03, 0.016))};
  Pose camera = top_down(0.45);
  std::vector<SceneObjectView> views;
  RenderResult truth;

  explicit Fixture(const Pose& object_pose = Pose(Rotation::identity(), Vec3(0, 0, 0.008))) {
    views.push_back({0, &model, object_pose});
    const RenderItem item{&model.bvh(), object_pose, 0};
    truth = render_scene({&item, 1}, camera, kCam);
  }

  std::vector<PoseEstimate> estimates(const PoseNoiseModel& noise, const DepthNoisePreset& preset,
                                      uint64_t seed) {
    const DepthImage corrupted = corrupt_depth(truth.depth, truth.incidence, preset, seed);
    return emit_pose_estimates(views, camera, kCam, truth, corrupted, noise, preset, seed, 0);
  }
};

}  // namespace

TEST_CASE("depth presets exist and interpolate hole probability") {
  const DepthNoisePreset raw = DepthNoisePreset::raw();
  const DepthNoisePreset enh = DepthNoisePreset::enhanced();
  CHECK(raw.gaussian_sigma > enh.gaussian_sigma);
  CHECK(raw.hole_prob(80.0 * M_PI / 180.0) > enh.hole_prob(80.0 * M_PI / 180.0));
  // Piecewise-linear: midpoint of two table nodes is the average.
  const double p45 = raw.hole_prob(45.0 * M_PI / 180.0);
  const double p90 = raw.hole_prob(90.0 * M_PI / 180.0);
  CHECK(raw.hole_prob(67.5 * M_PI / 180.0) == doctest::Approx(0.5 * (p45 + p90)));
  CHECK_THROWS_AS(DepthNoisePreset::by_name("nope"), std::invalid_argument);
}

TEST_CASE("corrupt_depth perturbs with the preset sigma and is seed-stable") {
  Fixture f;
  const DepthNoisePreset preset = DepthNoisePreset::enhanced();
  const DepthImage a = corrupt_depth(f.truth.depth, f.truth.incidence, preset, 5);
  const DepthImage b = corrupt_depth(f.truth.depth, f.truth.incidence, preset, 5);
  const DepthImage c = corrupt_depth(f.truth.depth, f.truth.incidence, preset, 6);
  REQUIRE(a.data == b.data);
  CHECK(a.data != c.data);

  double max_dev = 0.0;
  size_t valid = 0;
  for (size_t i = 0; i < a.data.size(); ++i) {
    if (f.truth.depth.data[i] <= 0) {
      CHECK(a.data[i] == 0.0);
      continue;
    }
    if (a.data[i] <= 0) continue;  // hole
    ++valid;
    max_dev = std::max(max_dev, std::abs(a.data[i] - f.truth.depth.data[i]));
  }
  CHECK(valid > 100);
  CHECK(max_dev < 6 * preset.gaussian_sigma);
  CHECK(max_dev > 0.0);
}

TEST_CASE("zero noise recovers the ground-truth pose in the camera frame") {
  Fixture f;
  PoseNoiseModel noise;
  noise.sigma_rot = 0;
  noise.sigma_trans = 0;
  noise.p_detect = 1;
  noise.p_sym = 0;
  noise.p_rear = 0;
  const auto ests = f.estimates(noise, DepthNoisePreset::enhanced(), 3);
  REQUIRE(ests.size() == 1);
  const Pose expected = f.camera.inverse() * f.views[0].world_pose;
  CHECK(ests[0].pose.approx_equal(expected, 1e-9, 1e-9));
  CHECK(ests[0].truth_id == 0);
  CHECK(ests[0].confidence > 0.9);  // unoccluded object
  CHECK(ests[0].z_mean > 0.0);
}

TEST_CASE("estimator error statistics follow the configured sigmas") {
  Fixture f;
  PoseNoiseModel noise;
  noise.p_detect = 1;
  noise.p_sym = 0;
  noise.p_rear = 0;
  const Pose truth_cam = f.camera.inverse() * f.views[0].world_pose;

  const int trials = 400;
  double rot_sq = 0, trans_sq = 0;
  for (int s = 0; s < trials; ++s) {
    const auto ests = f.estimates(noise, DepthNoisePreset::enhanced(), uint64_t(1000 + s));
    REQUIRE(ests.size() == 1);
    const double dr = angular_distance(ests[0].pose.rotation, truth_cam.rotation);
    rot_sq += dr * dr;
    trans_sq += (ests[0].pose.translation - truth_cam.translation).squaredNorm();
  }
  // Per-axis rotvec noise sigma_rot => expected squared angle ~ 3*sigma^2.
  const double rot_rms = std::sqrt(rot_sq / trials);
  const double trans_rms = std::sqrt(trans_sq / trials);
  CHECK(rot_rms == doctest::Approx(std::sqrt(3.0) * noise.sigma_rot).epsilon(0.15));
  CHECK(trans_rms == doctest::Approx(std::sqrt(3.0) * noise.sigma_trans).epsilon(0.15));
}

TEST_CASE("occluded objects fall below the detection threshold") {
  // Second box directly above the first fully hides it.
  Fixture f;
  const Pose above(Rotation::identity(), Vec3(0, 0, 0.1));
  f.views.push_back({1, &f.model, above});
  const std::vector<RenderItem> items = {{&f.model.bvh(), f.views[0].world_pose, 0},
                                         {&f.model.bvh(), above, 1}};
  f.truth = render_scene(items, f.camera, kCam);

  PoseNoiseModel noise;
  noise.p_detect = 1;
  noise.p_sym = 0;
  noise.p_rear = 0;
  const auto ests = f.estimates(noise, DepthNoisePreset::enhanced(), 9);
  REQUIRE(ests.size() == 1);
  CHECK(ests[0].truth_id == 1);
}

TEST_CASE("rear-flip injection places the centroid in front of the mask depth") {
  Fixture f;
  PoseNoiseModel noise;
  noise.sigma_rot = 0;
  noise.sigma_trans = 0;
  noise.p_detect = 1;
  noise.p_sym = 0;
  noise.p_rear = 1.0;  // force the failure mode
  const auto ests = f.estimates(noise, DepthNoisePreset::enhanced(), 13);
  REQUIRE(ests.size() == 1);
  CHECK(ests[0].injected_rear_flip);
  // Camera-frame centroid is now nearer than the observed mean mask depth.
  const Vec3 bb = project_bb_center(kCam, ests[0].bbox_center, ests[0].z_mean);
  CHECK(ests[0].pose.translation.norm() < bb.norm());
}

TEST_CASE("rejection filter separates flips from clean estimates") {
  Fixture f;
  PoseNoiseModel noise;
  noise.p_detect = 1;
  noise.p_sym = 0;
  noise.sigma_trans = 0.001;  // filter test: 16 mm flip vs 1 mm jitter

  int flips = 0, flips_rejected = 0, clean = 0, clean_rejected = 0;
  for (int s = 0; s < 300; ++s) {
    noise.p_rear = (s % 2 == 0) ? 1.0 : 0.0;
    const auto ests = f.estimates(noise, DepthNoisePreset::enhanced(), uint64_t(40000 + s));
    for (const auto& e : ests) {
      const bool keep = rejection_filter_keep(e, kCam, 0.005);
      if (e.injected_rear_flip) {
        ++flips;
        flips_rejected += keep ? 0 : 1;
      } else {
        ++clean;
        clean_rejected += keep ? 0 : 1;
      }
    }
  }
  REQUIRE(flips > 100);
  REQUIRE(clean > 100);
  CHECK(double(flips_rejected) / flips > 0.98);
  CHECK(double(clean_rejected) / clean < 0.02);
}

TEST_CASE("symmetry confusion is labeled and preserves appearance") {
  Fixture f;
  PoseNoiseModel noise;
  noise.sigma_rot = 0;
  noise.sigma_trans = 0;
  noise.p_detect = 1;
  noise.p_sym = 1.0;
  noise.p_rear = 0;
  const SymmetryGroup group = SymmetryGroup::box(Vec3(0.04, 0.03, 0.016));
  Fixture g;
  g.model = ObjectModel(1, "box", make_box(Vec3(0.04, 0.03, 0.016)), group);
  g.views[0].model = &g.model;
  const auto ests = g.estimates(noise, DepthNoisePreset::enhanced(), 17);
  REQUIRE(ests.size() == 1);
  CHECK(ests[0].injected_symmetry);
  // The injected element is a true symmetry: some group element maps the
  // estimate back onto the ground truth.
  const Pose truth_cam = g.camera.inverse() * g.views[0].world_pose;
  bool matches = false;
  for (const auto& s : group.discrete)
    matches =
        matches || angular_distance(ests[0].pose.rotation * s, truth_cam.rotation) < 1e-9;
  CHECK(matches);
}

TEST_CASE("estimates are deterministic per seed") {
  Fixture f;
  PoseNoiseModel noise;
  const auto a = f.estimates(noise, DepthNoisePreset::enhanced(), 77);
  const auto b = f.estimates(noise, DepthNoisePreset::enhanced(), 77);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].pose.approx_equal(b[i].pose, 0.0, 0.0));
    CHECK(a[i].confidence == b[i].confidence);
  }
}
