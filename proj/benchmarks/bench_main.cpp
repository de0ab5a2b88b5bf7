#include "binpick/primitives.hpp"
#include "binpick/scene.hpp"
#include "binpick/sim.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

using namespace binpick;

void bm_bvh_raycast(benchmark::State& state) {
  const TriangleMesh mesh = make_sphere(0.05, 32, 64);
  const Bvh bvh(mesh);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto _ : state) {
    const Vec3 origin(0.2 * u(rng), 0.2 * u(rng), 0.3);
    const Vec3 dir = Vec3(0.1 * u(rng), 0.1 * u(rng), -1.0).normalized();
    benchmark::DoNotOptimize(bvh.raycast(origin, dir));
  }
}
BENCHMARK(bm_bvh_raycast);

void bm_rotation_average(benchmark::State& state) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n(0.0, 0.1);
  std::vector<Rotation> samples;
  for (int i = 0; i < int(state.range(0)); ++i)
    samples.push_back(Rotation::from_rotvec(Vec3(n(rng), n(rng), n(rng))));
  for (auto _ : state) benchmark::DoNotOptimize(average_rotations(samples));
}
BENCHMARK(bm_rotation_average)->Arg(8)->Arg(64);

void bm_render_scene(benchmark::State& state) {
  RunConfig config;
  config.fill_count = 50;
  const ObjectModel model = build_object_model(config);
  const BinScene scene = generate_bin(model, config.fill_count, config.bin, 3);
  std::vector<RenderItem> items;
  for (const auto& inst : scene.instances) items.push_back({&model.bvh(), inst.pose, inst.id});
  for (const auto& s : scene.statics()) items.push_back({s.bvh, s.pose, -1});
  const Pose cam(Rotation::from_axis_angle(Vec3::UnitX(), M_PI), Vec3(0, 0, 0.45));
  CameraIntrinsics k{140, 140, 80, 60, 160, 120};
  for (auto _ : state) benchmark::DoNotOptimize(render_scene(items, cam, k));
}
BENCHMARK(bm_render_scene)->Unit(benchmark::kMillisecond);

void bm_carve(benchmark::State& state) {
  const TriangleMesh mesh = make_box(Vec3(0.04, 0.03, 0.016));
  const Bvh bvh(mesh);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  std::vector<Vec3> points;
  for (int i = 0; i < 15000; ++i) points.emplace_back(u(rng), u(rng), 0.05 + 0.3 * (u(rng) + 0.1));
  std::vector<PosedMesh> targets = {{&bvh, Pose()}};
  const VoxelGrid spec(Vec3(-0.15, -0.15, 0.0), 0.005, Eigen::Vector3i(60, 60, 40));
  for (auto _ : state)
    benchmark::DoNotOptimize(classify_and_carve(points, targets, {}, CarveConfig{}, spec));
}
BENCHMARK(bm_carve)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
