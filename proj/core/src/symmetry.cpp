#include "binpick/symmetry.hpp"

#include <cmath>

namespace binpick {

namespace {

// Best in-axis angle for min distance between base * R(axis, theta) and ref:
// maximize |<q_axis(theta), q_base^* q_ref>| in quaternion space.
Rotation best_axis_rotation(const Rotation& base, const Rotation& ref, const Vec3& axis) {
  const Quat rel = base.quat().conjugate() * ref.quat();
  const double w = rel.w();
  const double p = axis.normalized().dot(rel.vec());
  if (std::abs(w) < 1e-15 && std::abs(p) < 1e-15) return Rotation::identity();
  const double half = std::atan2(p, w);
  return Rotation::from_axis_angle(axis, 2.0 * half);
}

Rotation reduce_continuous(const Rotation& base, const Rotation& ref,
                           const std::vector<Vec3>& axes) {
  Rotation out = base;
  if (axes.empty()) return out;
  const int passes = axes.size() > 1 ? 3 : 1;
  for (int p = 0; p < passes; ++p)
    for (const Vec3& a : axes) out = out * best_axis_rotation(out, ref, a);
  return out;
}

}  // namespace

Rotation canonicalize_rotation(const Rotation& r, const Rotation& reference,
                               const SymmetryGroup& group) {
  Rotation best = r;
  double best_d = std::numeric_limits<double>::infinity();
  for (const Rotation& s : group.discrete) {
    const Rotation cand = reduce_continuous(r * s, reference, group.continuous_axes);
    const double d = angular_distance(cand, reference);
    if (d < best_d) {
      best_d = d;
      best = cand;
    }
  }
  return best;
}

Pose canonicalize(const Pose& pose, const Pose& reference, const SymmetryGroup& group) {
  return Pose(canonicalize_rotation(pose.rotation, reference.rotation, group), pose.translation);
}

void SymmetryGroup::validate(double tol) const {
  bool has_identity = false;
  for (const auto& s : discrete)
    if (angular_distance(s, Rotation::identity()) <= tol) has_identity = true;
  if (!has_identity) throw std::invalid_argument("symmetry group: missing identity");
  for (const auto& a : discrete)
    for (const auto& b : discrete) {
      const Rotation ab = a * b;
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : discrete) {
        const Rotation red = reduce_continuous(ab, c, continuous_axes);
        best = std::min(best, angular_distance(red, c));
      }
      if (best > tol) throw std::invalid_argument("symmetry group: not closed under composition");
    }
}

SymmetryGroup SymmetryGroup::cylinder_z() {
  SymmetryGroup g;
  g.discrete = {Rotation::identity(), Rotation::from_axis_angle(Vec3::UnitX(), M_PI)};
  g.continuous_axes = {Vec3::UnitZ()};
  return g;
}

SymmetryGroup SymmetryGroup::cube() {
  // closure from two 90-degree generators
  std::vector<Rotation> elems = {Rotation::identity()};
  const Rotation gens[2] = {Rotation::from_axis_angle(Vec3::UnitX(), M_PI / 2),
                            Rotation::from_axis_angle(Vec3::UnitZ(), M_PI / 2)};
  bool grew = true;
  while (grew) {
    grew = false;
    for (size_t i = 0; i < elems.size(); ++i)
      for (const auto& g : gens) {
        const Rotation cand = elems[i] * g;
        bool found = false;
        for (const auto& e : elems)
          if (angular_distance(cand, e) < 1e-9) {
            found = true;
            break;
          }
        if (!found) {
          elems.push_back(cand);
          grew = true;
        }
      }
  }
  SymmetryGroup out;
  out.discrete = std::move(elems);
  return out;
}

SymmetryGroup SymmetryGroup::box(const Vec3& extents) {
  const SymmetryGroup full = cube();
  SymmetryGroup out;
  out.discrete.clear();
  for (const auto& r : full.discrete) {
    const Mat3 m = r.matrix().cwiseAbs();
    const Vec3 mapped = m * extents;
    if ((mapped - extents).norm() < 1e-9 * std::max(1.0, extents.norm()))
      out.discrete.push_back(r);
  }
  return out;
}

}  // namespace binpick
