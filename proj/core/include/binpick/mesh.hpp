#pragma once

#include "binpick/geometry.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace binpick {

struct ParseError : std::runtime_error {
  size_t byte_offset;
  ParseError(const std::string& what, size_t offset)
      : std::runtime_error(what + " (byte " + std::to_string(offset) + ")"), byte_offset(offset) {}
};

struct EmptyMesh : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Aabb {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = Vec3::Constant(-std::numeric_limits<double>::infinity());

  void expand(const Vec3& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  void expand(const Aabb& b) {
    lo = lo.cwiseMin(b.lo);
    hi = hi.cwiseMax(b.hi);
  }
  bool valid() const { return (lo.array() <= hi.array()).all(); }
  Vec3 center() const { return 0.5 * (lo + hi); }
  Vec3 extents() const { return hi - lo; }
  bool contains(const Vec3& p) const {
    return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
  }
  bool overlaps(const Aabb& b) const {
    return (lo.array() <= b.hi.array()).all() && (hi.array() >= b.lo.array()).all();
  }
  Aabb inflated(double r) const {
    Aabb b;
    b.lo = lo - Vec3::Constant(r);
    b.hi = hi + Vec3::Constant(r);
    return b;
  }
};

enum class MeshFormat { Stl, Obj, Auto };

/// Indexed triangle mesh with per-triangle unit normals recomputed from
/// vertex winding. Degenerate (zero-area) triangles are dropped at load.
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<uint32_t, 3>> triangles;
  std::vector<Vec3> normals;  // per-triangle, unit length

  size_t triangle_count() const { return triangles.size(); }
  std::array<Vec3, 3> triangle(size_t i) const {
    const auto& t = triangles[i];
    return {vertices[t[0]], vertices[t[1]], vertices[t[2]]};
  }
  double triangle_area(size_t i) const {
    const auto tri = triangle(i);
    return 0.5 * (tri[1] - tri[0]).cross(tri[2] - tri[0]).norm();
  }
  double total_area() const;
  Aabb aabb() const;
  Vec3 centroid() const;  // area-weighted surface centroid
  TriangleMesh transformed(const Pose& pose) const;
  void recompute_normals();
  /// Drops zero-area triangles and out-of-range indices; returns removed count.
  size_t drop_degenerate(double area_eps = 1e-12);
};

TriangleMesh load_mesh(const std::string& path, MeshFormat format = MeshFormat::Auto);
TriangleMesh parse_stl(const std::string& data);
TriangleMesh parse_obj(const std::string& data);
void save_stl(const TriangleMesh& mesh, const std::string& path);

struct RayHit {
  double distance = 0.0;  // meters, >= 0
  uint32_t triangle = 0;
  Vec3 point = Vec3::Zero();
  Vec3 normal = Vec3::Zero();
};

inline constexpr double kRayEpsilon = 1e-6;  // meters; skips the launch triangle

/// Median-split BVH over triangle centroids. Immutable after build.
class Bvh {
 public:
  Bvh() = default;
  explicit Bvh(const TriangleMesh& mesh);

  const TriangleMesh& mesh() const { return *mesh_; }
  bool empty() const { return nodes_.empty(); }
  Aabb root_aabb() const { return nodes_.empty() ? Aabb{} : nodes_[0].box; }

  std::optional<RayHit> raycast(const Vec3& origin, const Vec3& direction,
                                double min_distance = kRayEpsilon,
                                double max_distance = std::numeric_limits<double>::infinity()) const;

  /// Unsigned distance from point to the mesh surface, pruned at `cap`
  /// (returns a value > cap when the true distance exceeds it).
  double distance(const Vec3& point, double cap = std::numeric_limits<double>::infinity()) const;

  /// Indices of triangles whose AABB overlaps `box` and that pass the
  /// exact triangle-box test.
  std::vector<uint32_t> triangles_in_box(const Aabb& box) const;
  bool any_triangle_in_box(const Aabb& box) const;

 private:
  struct Node {
    Aabb box;
    int32_t left = -1;   // child index, or -1 for leaf
    int32_t right = -1;
    uint32_t first = 0;  // leaf: range into tri_order_
    uint32_t count = 0;
  };
  int32_t build(uint32_t first, uint32_t count, const std::vector<Vec3>& centroids);

  const TriangleMesh* mesh_ = nullptr;
  std::vector<Node> nodes_;
  std::vector<uint32_t> tri_order_;

  friend bool bvh_intersect(const Bvh&, const Bvh&, const Pose&);
};

/// Moller-Trumbore; returns hit distance along (unit or not) direction.
std::optional<double> ray_triangle(const Vec3& origin, const Vec3& dir, const Vec3& a,
                                   const Vec3& b, const Vec3& c);

bool triangles_intersect(const std::array<Vec3, 3>& t1, const std::array<Vec3, 3>& t2);
bool triangle_box_overlap(const Vec3& box_center, const Vec3& box_half, const std::array<Vec3, 3>& tri);
double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

/// Parity test along a fixed ray direction; points on the surface are
/// reported inside.
bool point_in_mesh(const Bvh& bvh, const Vec3& point);

/// Surface test plus single-point containment check for closed meshes
/// fully inside one another.
bool meshes_intersect(const Bvh& a, const Pose& pose_a, const Bvh& b, const Pose& pose_b);
bool meshes_intersect(const TriangleMesh& a, const Pose& pose_a, const TriangleMesh& b,
                      const Pose& pose_b);

struct SurfaceSample {
  Vec3 point;
  Vec3 normal;
  uint32_t triangle;
};

/// Area-weighted surface sampling, deterministic for a fixed seed.
std::vector<SurfaceSample> sample_surface(const TriangleMesh& mesh, size_t n, uint64_t seed);

}  // namespace binpick
