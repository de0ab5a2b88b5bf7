#pragma once

#include "binpick/geometry.hpp"

namespace binpick {

/// Object symmetry: finite rotation set plus full-revolution axes, both in
/// the object frame. The discrete list must contain the identity and be
/// closed under composition (checked by validate()).
struct SymmetryGroup {
  std::vector<Rotation> discrete{Rotation::identity()};
  std::vector<Vec3> continuous_axes;

  static SymmetryGroup trivial() { return {}; }
  static SymmetryGroup cylinder_z();   // revolution about z plus the flip
  static SymmetryGroup box(const Vec3& extents);  // matching face rotations
  static SymmetryGroup cube();         // full 24-element rotation group

  bool is_trivial() const { return discrete.size() == 1 && continuous_axes.empty(); }
  void validate(double tol = 1e-6) const;
};

/// S * pose minimizing the angular distance to `reference` over the group.
/// Continuous axes solve the in-axis angle in closed form. Translation is
/// untouched (symmetries act about the object origin).
Pose canonicalize(const Pose& pose, const Pose& reference, const SymmetryGroup& group);
Rotation canonicalize_rotation(const Rotation& r, const Rotation& reference,
                               const SymmetryGroup& group);

}  // namespace binpick
