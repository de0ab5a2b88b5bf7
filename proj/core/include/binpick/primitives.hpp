#pragma once

#include "binpick/mesh.hpp"

namespace binpick {

/// Axis-aligned box centered at the origin, outward winding.
TriangleMesh make_box(const Vec3& extents);

/// Closed cylinder about +z, centered at the origin.
TriangleMesh make_cylinder(double radius, double height, int segments = 32);

/// UV sphere centered at the origin.
TriangleMesh make_sphere(double radius, int stacks = 16, int slices = 32);

/// Non-convex L-shaped part (two fused boxes), centered on its AABB.
TriangleMesh make_l_shape(double leg, double width, double thickness);

/// Open-top bin: floor plus four walls, interior extents given. Origin at
/// the center of the interior floor.
TriangleMesh make_open_bin(const Vec3& interior, double wall_thickness);

}  // namespace binpick
