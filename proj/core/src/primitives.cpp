#include "binpick/primitives.hpp"

#include <cmath>

namespace binpick {

namespace {
void add_quad(TriangleMesh& m, const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  const uint32_t base = uint32_t(m.vertices.size());
  m.vertices.insert(m.vertices.end(), {a, b, c, d});
  m.triangles.push_back({base, base + 1, base + 2});
  m.triangles.push_back({base, base + 2, base + 3});
}

void append_box(TriangleMesh& m, const Vec3& lo, const Vec3& hi) {
  const Vec3 v000(lo.x(), lo.y(), lo.z()), v100(hi.x(), lo.y(), lo.z());
  const Vec3 v010(lo.x(), hi.y(), lo.z()), v110(hi.x(), hi.y(), lo.z());
  const Vec3 v001(lo.x(), lo.y(), hi.z()), v101(hi.x(), lo.y(), hi.z());
  const Vec3 v011(lo.x(), hi.y(), hi.z()), v111(hi.x(), hi.y(), hi.z());
  add_quad(m, v000, v010, v110, v100);  // -z
  add_quad(m, v001, v101, v111, v011);  // +z
  add_quad(m, v000, v100, v101, v001);  // -y
  add_quad(m, v010, v011, v111, v110);  // +y
  add_quad(m, v000, v001, v011, v010);  // -x
  add_quad(m, v100, v110, v111, v101);  // +x
}
}  // namespace

TriangleMesh make_box(const Vec3& extents) {
  TriangleMesh m;
  append_box(m, -0.5 * extents, 0.5 * extents);
  m.recompute_normals();
  return m;
}

TriangleMesh make_cylinder(double radius, double height, int segments) {
  TriangleMesh m;
  const double h = 0.5 * height;
  const uint32_t top_center = 0, bot_center = 1;
  m.vertices.emplace_back(0, 0, h);
  m.vertices.emplace_back(0, 0, -h);
  for (int i = 0; i < segments; ++i) {
    const double a = 2.0 * M_PI * i / segments;
    m.vertices.emplace_back(radius * std::cos(a), radius * std::sin(a), h);
    m.vertices.emplace_back(radius * std::cos(a), radius * std::sin(a), -h);
  }
  for (int i = 0; i < segments; ++i) {
    const uint32_t t0 = 2 + 2 * i, b0 = t0 + 1;
    const uint32_t t1 = 2 + 2 * ((i + 1) % segments), b1 = t1 + 1;
    m.triangles.push_back({top_center, t0, t1});
    m.triangles.push_back({bot_center, b1, b0});
    m.triangles.push_back({t0, b0, b1});
    m.triangles.push_back({t0, b1, t1});
  }
  m.recompute_normals();
  return m;
}

TriangleMesh make_sphere(double radius, int stacks, int slices) {
  TriangleMesh m;
  for (int i = 0; i <= stacks; ++i) {
    const double phi = M_PI * i / stacks;
    for (int j = 0; j < slices; ++j) {
      const double th = 2.0 * M_PI * j / slices;
      m.vertices.emplace_back(radius * std::sin(phi) * std::cos(th),
                              radius * std::sin(phi) * std::sin(th), radius * std::cos(phi));
    }
  }
  auto idx = [&](int i, int j) { return uint32_t(i * slices + (j % slices)); };
  for (int i = 0; i < stacks; ++i)
    for (int j = 0; j < slices; ++j) {
      m.triangles.push_back({idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)});
      m.triangles.push_back({idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)});
    }
  m.drop_degenerate();  // pole caps produce slivers
  return m;
}

TriangleMesh make_l_shape(double leg, double width, double thickness) {
  TriangleMesh m;
  // Two boxes sharing a corner; interior faces overlap, which is fine for
  // surface queries.
  append_box(m, Vec3(0, 0, 0), Vec3(leg, width, thickness));
  append_box(m, Vec3(0, 0, 0), Vec3(thickness, width, leg));
  m.recompute_normals();
  // center on AABB
  const Vec3 c = m.aabb().center();
  for (auto& v : m.vertices) v -= c;
  return m;
}

TriangleMesh make_open_bin(const Vec3& interior, double wall_thickness) {
  TriangleMesh m;
  const double hx = 0.5 * interior.x(), hy = 0.5 * interior.y(), hz = interior.z();
  const double w = wall_thickness;
  append_box(m, Vec3(-hx - w, -hy - w, -w), Vec3(hx + w, hy + w, 0));          // floor
  append_box(m, Vec3(-hx - w, -hy - w, 0), Vec3(-hx, hy + w, hz));             // -x wall
  append_box(m, Vec3(hx, -hy - w, 0), Vec3(hx + w, hy + w, hz));               // +x wall
  append_box(m, Vec3(-hx, -hy - w, 0), Vec3(hx, -hy, hz));                     // -y wall
  append_box(m, Vec3(-hx, hy, 0), Vec3(hx, hy + w, hz));                       // +y wall
  m.recompute_normals();
  return m;
}

}  // namespace binpick
