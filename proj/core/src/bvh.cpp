#include "binpick/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace binpick {

namespace {
constexpr uint32_t kLeafSize = 4;

Aabb triangle_aabb(const std::array<Vec3, 3>& t) {
  Aabb b;
  b.expand(t[0]);
  b.expand(t[1]);
  b.expand(t[2]);
  return b;
}

// Slab test; dir_inv may contain infinities for axis-aligned rays.
bool ray_aabb(const Vec3& origin, const Vec3& dir_inv, const Aabb& box, double tmax) {
  double t0 = 0.0, t1 = tmax;
  for (int i = 0; i < 3; ++i) {
    double ta = (box.lo[i] - origin[i]) * dir_inv[i];
    double tb = (box.hi[i] - origin[i]) * dir_inv[i];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return false;
  }
  return true;
}

double aabb_distance_sq(const Vec3& p, const Aabb& box) {
  double d = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double v = std::max({box.lo[i] - p[i], 0.0, p[i] - box.hi[i]});
    d += v * v;
  }
  return d;
}
}  // namespace

Bvh::Bvh(const TriangleMesh& mesh) : mesh_(&mesh) {
  const uint32_t n = uint32_t(mesh.triangle_count());
  if (n == 0) return;
  tri_order_.resize(n);
  std::iota(tri_order_.begin(), tri_order_.end(), 0u);
  std::vector<Vec3> centroids(n);
  for (uint32_t i = 0; i < n; ++i) {
    const auto t = mesh.triangle(i);
    centroids[i] = (t[0] + t[1] + t[2]) / 3.0;
  }
  nodes_.reserve(2 * n);
  build(0, n, centroids);
}

int32_t Bvh::build(uint32_t first, uint32_t count, const std::vector<Vec3>& centroids) {
  const int32_t idx = int32_t(nodes_.size());
  nodes_.emplace_back();
  Aabb box;
  for (uint32_t i = first; i < first + count; ++i)
    box.expand(triangle_aabb(mesh_->triangle(tri_order_[i])));
  nodes_[idx].box = box;

  if (count <= kLeafSize) {
    nodes_[idx].first = first;
    nodes_[idx].count = count;
    return idx;
  }
  // median split on the widest centroid axis
  Aabb cbox;
  for (uint32_t i = first; i < first + count; ++i) cbox.expand(centroids[tri_order_[i]]);
  int axis = 0;
  cbox.extents().maxCoeff(&axis);
  const uint32_t mid = first + count / 2;
  std::nth_element(tri_order_.begin() + first, tri_order_.begin() + mid,
                   tri_order_.begin() + first + count, [&](uint32_t a, uint32_t b) {
                     return centroids[a][axis] < centroids[b][axis] || (centroids[a][axis] == centroids[b][axis] && a < b);
                   });
  const int32_t l = build(first, mid - first, centroids);
  const int32_t r = build(mid, first + count - mid, centroids);
  nodes_[idx].left = l;
  nodes_[idx].right = r;
  return idx;
}

std::optional<double> ray_triangle(const Vec3& origin, const Vec3& dir, const Vec3& a,
                                   const Vec3& b, const Vec3& c) {
  const Vec3 e1 = b - a, e2 = c - a;
  const Vec3 p = dir.cross(e2);
  const double det = e1.dot(p);
  if (std::abs(det) < 1e-14) return std::nullopt;
  const double inv = 1.0 / det;
  const Vec3 s = origin - a;
  const double u = s.dot(p) * inv;
  if (u < -1e-12 || u > 1.0 + 1e-12) return std::nullopt;
  const Vec3 q = s.cross(e1);
  const double v = dir.dot(q) * inv;
  if (v < -1e-12 || u + v > 1.0 + 1e-12) return std::nullopt;
  const double t = e2.dot(q) * inv;
  if (t < 0.0) return std::nullopt;
  return t;
}

std::optional<RayHit> Bvh::raycast(const Vec3& origin, const Vec3& direction, double min_distance,
                                   double max_distance) const {
  if (nodes_.empty()) return std::nullopt;
  const double dn = direction.norm();
  if (dn == 0.0) throw std::invalid_argument("raycast: zero direction");
  const Vec3 dir = direction / dn;
  const Vec3 dir_inv = dir.cwiseInverse();

  std::optional<RayHit> best;
  double tmax = max_distance;
  int32_t stack[64];
  int sp = 0;
  stack[sp++] = 0;
  while (sp > 0) {
    const Node& node = nodes_[stack[--sp]];
    if (!ray_aabb(origin, dir_inv, node.box, tmax)) continue;
    if (node.left < 0) {
      for (uint32_t i = node.first; i < node.first + node.count; ++i) {
        const uint32_t ti = tri_order_[i];
        const auto tri = mesh_->triangle(ti);
        const auto t = ray_triangle(origin, dir, tri[0], tri[1], tri[2]);
        if (t && *t > min_distance && *t < tmax) {
          tmax = *t;
          RayHit hit;
          hit.distance = *t;
          hit.triangle = ti;
          hit.point = origin + dir * *t;
          hit.normal = mesh_->normals[ti];
          best = hit;
        }
      }
    } else {
      stack[sp++] = node.left;
      stack[sp++] = node.right;
    }
  }
  return best;
}

double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  // Ericson, Real-Time Collision Detection, closest point on triangle.
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return (p - a).norm();
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return (p - b).norm();
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return (p - (a + ab * (d1 / (d1 - d3)))).norm();
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return (p - c).norm();
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return (p - (a + ac * (d2 / (d2 - d6)))).norm();
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return (p - (b + (c - b) * w)).norm();
  }
  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom, w = vc * denom;
  return (p - (a + ab * v + ac * w)).norm();
}

double Bvh::distance(const Vec3& point, double cap) const {
  if (nodes_.empty()) return cap;
  double best = cap;
  int32_t stack[64];
  int sp = 0;
  stack[sp++] = 0;
  while (sp > 0) {
    const Node& node = nodes_[stack[--sp]];
    if (aabb_distance_sq(point, node.box) >= best * best) continue;
    if (node.left < 0) {
      for (uint32_t i = node.first; i < node.first + node.count; ++i) {
        const auto tri = mesh_->triangle(tri_order_[i]);
        best = std::min(best, point_triangle_distance(point, tri[0], tri[1], tri[2]));
      }
    } else {
      stack[sp++] = node.left;
      stack[sp++] = node.right;
    }
  }
  return best;
}

bool triangle_box_overlap(const Vec3& box_center, const Vec3& box_half,
                          const std::array<Vec3, 3>& tri) {
  // Akenine-Moller SAT.
  const Vec3 v0 = tri[0] - box_center, v1 = tri[1] - box_center, v2 = tri[2] - box_center;
  const Vec3 e0 = v1 - v0, e1 = v2 - v1, e2 = v0 - v2;

  auto axis_test = [&](const Vec3& axis) {
    const double p0 = v0.dot(axis), p1 = v1.dot(axis), p2 = v2.dot(axis);
    const double r = box_half.x() * std::abs(axis.x()) + box_half.y() * std::abs(axis.y()) +
                     box_half.z() * std::abs(axis.z());
    return std::min({p0, p1, p2}) > r || std::max({p0, p1, p2}) < -r;
  };

  const Vec3 axes[3] = {Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};
  for (const Vec3& e : {e0, e1, e2})
    for (const Vec3& a : axes)
      if (axis_test(a.cross(e))) return false;

  for (int i = 0; i < 3; ++i) {
    const double mn = std::min({v0[i], v1[i], v2[i]});
    const double mx = std::max({v0[i], v1[i], v2[i]});
    if (mn > box_half[i] || mx < -box_half[i]) return false;
  }
  return !axis_test(e0.cross(e1));
}

std::vector<uint32_t> Bvh::triangles_in_box(const Aabb& box) const {
  std::vector<uint32_t> out;
  if (nodes_.empty()) return out;
  const Vec3 c = box.center(), h = 0.5 * box.extents();
  int32_t stack[64];
  int sp = 0;
  stack[sp++] = 0;
  while (sp > 0) {
    const Node& node = nodes_[stack[--sp]];
    if (!node.box.overlaps(box)) continue;
    if (node.left < 0) {
      for (uint32_t i = node.first; i < node.first + node.count; ++i) {
        const uint32_t ti = tri_order_[i];
        if (triangle_box_overlap(c, h, mesh_->triangle(ti))) out.push_back(ti);
      }
    } else {
      stack[sp++] = node.left;
      stack[sp++] = node.right;
    }
  }
  return out;
}

bool Bvh::any_triangle_in_box(const Aabb& box) const {
  if (nodes_.empty()) return false;
  const Vec3 c = box.center(), h = 0.5 * box.extents();
  int32_t stack[64];
  int sp = 0;
  stack[sp++] = 0;
  while (sp > 0) {
    const Node& node = nodes_[stack[--sp]];
    if (!node.box.overlaps(box)) continue;
    if (node.left < 0) {
      for (uint32_t i = node.first; i < node.first + node.count; ++i)
        if (triangle_box_overlap(c, h, mesh_->triangle(tri_order_[i]))) return true;
    } else {
      stack[sp++] = node.left;
      stack[sp++] = node.right;
    }
  }
  return false;
}

namespace {

// Devillers-Guigue style cross-plane test reduced to interval overlap; the
// coplanar branch projects onto the dominant plane axis pair.
bool coplanar_tri_tri(const std::array<Vec3, 3>& t1, const std::array<Vec3, 3>& t2,
                      const Vec3& n) {
  int x = 0, y = 1;
  const Vec3 an = n.cwiseAbs();
  if (an.x() >= an.y() && an.x() >= an.z()) {
    x = 1;
    y = 2;
  } else if (an.y() >= an.z()) {
    x = 0;
    y = 2;
  }
  auto seg_seg = [&](const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
    const double d1 = (b[x] - a[x]) * (c[y] - a[y]) - (b[y] - a[y]) * (c[x] - a[x]);
    const double d2 = (b[x] - a[x]) * (d[y] - a[y]) - (b[y] - a[y]) * (d[x] - a[x]);
    const double d3 = (d[x] - c[x]) * (a[y] - c[y]) - (d[y] - c[y]) * (a[x] - c[x]);
    const double d4 = (d[x] - c[x]) * (b[y] - c[y]) - (d[y] - c[y]) * (b[x] - c[x]);
    return d1 * d2 <= 0.0 && d3 * d4 <= 0.0;
  };
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (seg_seg(t1[i], t1[(i + 1) % 3], t2[j], t2[(j + 1) % 3])) return true;
  auto inside = [&](const Vec3& p, const std::array<Vec3, 3>& t) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i) {
      const Vec3 &a = t[i], &b = t[(i + 1) % 3];
      const double cr = (b[x] - a[x]) * (p[y] - a[y]) - (b[y] - a[y]) * (p[x] - a[x]);
      if (i == 0) s = cr;
      if (cr * s < 0.0) return false;
    }
    return true;
  };
  return inside(t1[0], t2) || inside(t2[0], t1);
}

}  // namespace

bool triangles_intersect(const std::array<Vec3, 3>& t1, const std::array<Vec3, 3>& t2) {
  const Vec3 n1 = (t1[1] - t1[0]).cross(t1[2] - t1[0]);
  const double d1 = -n1.dot(t1[0]);
  double du[3];
  for (int i = 0; i < 3; ++i) du[i] = n1.dot(t2[i]) + d1;
  const double scale1 = n1.norm();
  const double eps1 = 1e-12 * std::max(scale1, 1e-300);
  for (auto& v : du)
    if (std::abs(v) < eps1) v = 0.0;
  if ((du[0] > 0 && du[1] > 0 && du[2] > 0) || (du[0] < 0 && du[1] < 0 && du[2] < 0)) return false;

  const Vec3 n2 = (t2[1] - t2[0]).cross(t2[2] - t2[0]);
  const double d2 = -n2.dot(t2[0]);
  double dv[3];
  for (int i = 0; i < 3; ++i) dv[i] = n2.dot(t1[i]) + d2;
  const double eps2 = 1e-12 * std::max(n2.norm(), 1e-300);
  for (auto& v : dv)
    if (std::abs(v) < eps2) v = 0.0;
  if ((dv[0] > 0 && dv[1] > 0 && dv[2] > 0) || (dv[0] < 0 && dv[1] < 0 && dv[2] < 0)) return false;

  if (du[0] == 0 && du[1] == 0 && du[2] == 0) return coplanar_tri_tri(t1, t2, n1);

  const Vec3 d = n1.cross(n2);
  int axis = 0;
  d.cwiseAbs().maxCoeff(&axis);

  auto interval = [&](const std::array<Vec3, 3>& t, const double* dist, double& lo, double& hi) {
    // order vertices so that v0,v1 are on one side and v2 on the other (or on plane)
    int a = 0, b = 1, c = 2;
    if (dist[0] * dist[2] > 0) {
      a = 0; b = 2; c = 1;
    } else if (dist[1] * dist[2] > 0) {
      a = 1; b = 2; c = 0;
    } else if (dist[0] * dist[1] > 0) {
      a = 0; b = 1; c = 2;
    } else {
      // at least one vertex on the plane
      if (dist[0] == 0 && dist[1] * dist[2] >= 0) { c = 0; a = 1; b = 2; }
      else if (dist[1] == 0 && dist[0] * dist[2] >= 0) { c = 1; a = 0; b = 2; }
      else { c = 2; a = 0; b = 1; }
    }
    const double pa = t[a][axis], pb = t[b][axis], pc = t[c][axis];
    const double da = dist[a], db = dist[b], dc = dist[c];
    double t1v = da != dc ? pa + (pc - pa) * da / (da - dc) : pa;
    double t2v = db != dc ? pb + (pc - pb) * db / (db - dc) : pb;
    lo = std::min(t1v, t2v);
    hi = std::max(t1v, t2v);
  };

  double lo1, hi1, lo2, hi2;
  interval(t1, dv, lo1, hi1);
  interval(t2, du, lo2, hi2);
  return hi1 >= lo2 && hi2 >= lo1;
}

bool point_in_mesh(const Bvh& bvh, const Vec3& point) {
  if (bvh.empty()) return false;
  // Slightly irrational direction avoids edge-grazing parity errors.
  const Vec3 dir = Vec3(0.5377397354, 0.2123418416, 0.8159657963).normalized();
  size_t crossings = 0;
  double t = 0.0;
  while (true) {
    const auto hit = bvh.raycast(point, dir, t + kRayEpsilon);
    if (!hit) break;
    ++crossings;
    t = hit->distance;
    if (crossings > 4096) break;  // degenerate geometry guard
  }
  return crossings % 2 == 1;
}

bool meshes_intersect(const Bvh& a, const Pose& pose_a, const Bvh& b, const Pose& pose_b) {
  if (a.empty() || b.empty()) return false;
  // Work in A's frame.
  const Pose b_in_a = pose_a.inverse() * pose_b;
  if (bvh_intersect(a, b, b_in_a)) return true;
  // Containment: one representative vertex each way.
  const Vec3 pb = b_in_a * b.mesh().vertices[b.mesh().triangles[0][0]];
  if (point_in_mesh(a, pb)) return true;
  const Pose a_in_b = b_in_a.inverse();
  const Vec3 pa = a_in_b * a.mesh().vertices[a.mesh().triangles[0][0]];
  return point_in_mesh(b, pa);
}

bool bvh_intersect(const Bvh& a, const Bvh& b, const Pose& b_in_a) {
  struct Pair {
    int32_t na, nb;
  };
  // B's node boxes are transformed conservatively into A's frame.
  const Mat3 r = b_in_a.rotation.matrix();
  const Mat3 rabs = r.cwiseAbs();
  auto transform_box = [&](const Aabb& box) {
    const Vec3 c = b_in_a * box.center();
    const Vec3 h = rabs * (0.5 * box.extents());
    Aabb out;
    out.lo = c - h;
    out.hi = c + h;
    return out;
  };

  std::vector<Pair> stack;
  stack.push_back({0, 0});
  while (!stack.empty()) {
    const Pair p = stack.back();
    stack.pop_back();
    const auto& na = a.nodes_[p.na];
    const auto& nb = b.nodes_[p.nb];
    if (!na.box.overlaps(transform_box(nb.box))) continue;
    const bool leaf_a = na.left < 0, leaf_b = nb.left < 0;
    if (leaf_a && leaf_b) {
      for (uint32_t i = na.first; i < na.first + na.count; ++i) {
        const auto ta = a.mesh().triangle(a.tri_order_[i]);
        for (uint32_t j = nb.first; j < nb.first + nb.count; ++j) {
          auto tb = b.mesh().triangle(b.tri_order_[j]);
          for (auto& v : tb) v = b_in_a * v;
          if (triangles_intersect(ta, tb)) return true;
        }
      }
    } else if (leaf_b || (!leaf_a && na.box.extents().squaredNorm() > nb.box.extents().squaredNorm())) {
      stack.push_back({na.left, p.nb});
      stack.push_back({na.right, p.nb});
    } else {
      stack.push_back({p.na, nb.left});
      stack.push_back({p.na, nb.right});
    }
  }
  return false;
}

bool meshes_intersect(const TriangleMesh& a, const Pose& pose_a, const TriangleMesh& b,
                      const Pose& pose_b) {
  const Bvh ba(a), bb(b);
  return meshes_intersect(ba, pose_a, bb, pose_b);
}

std::vector<SurfaceSample> sample_surface(const TriangleMesh& mesh, size_t n, uint64_t seed) {
  if (mesh.triangles.empty()) throw EmptyMesh("sample_surface: empty mesh");
  std::vector<double> cdf(mesh.triangle_count());
  double acc = 0.0;
  for (size_t i = 0; i < mesh.triangle_count(); ++i) {
    acc += mesh.triangle_area(i);
    cdf[i] = acc;
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<SurfaceSample> out;
  out.reserve(n);
  for (size_t k = 0; k < n; ++k) {
    const double r = uni(rng) * acc;
    const size_t ti = size_t(std::lower_bound(cdf.begin(), cdf.end(), r) - cdf.begin());
    const auto tri = mesh.triangle(std::min(ti, mesh.triangle_count() - 1));
    double u = uni(rng), v = uni(rng);
    if (u + v > 1.0) {
      u = 1.0 - u;
      v = 1.0 - v;
    }
    SurfaceSample s;
    s.triangle = uint32_t(std::min(ti, mesh.triangle_count() - 1));
    s.point = tri[0] + u * (tri[1] - tri[0]) + v * (tri[2] - tri[0]);
    s.normal = mesh.normals[s.triangle];
    out.push_back(s);
  }
  return out;
}

}  // namespace binpick
