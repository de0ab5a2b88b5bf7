#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <span>
#include <stdexcept>
#include <vector>

namespace binpick {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

struct EmptyInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Unit-quaternion rotation. Normalized on every construction; q and -q
/// represent the same rotation.
class Rotation {
 public:
  Rotation() : q_(1.0, 0.0, 0.0, 0.0) {}
  explicit Rotation(const Quat& q) : q_(q.normalized()) {}
  Rotation(double w, double x, double y, double z) : q_(w, x, y, z) { q_.normalize(); }
  explicit Rotation(const Mat3& m) : q_(m) { q_.normalize(); }

  static Rotation identity() { return Rotation(); }
  static Rotation from_axis_angle(const Vec3& axis, double angle) {
    return Rotation(Quat(Eigen::AngleAxisd(angle, axis.normalized())));
  }
  static Rotation from_rotvec(const Vec3& rv) {
    const double n = rv.norm();
    if (n < 1e-14) return Rotation();
    return from_axis_angle(rv / n, n);
  }

  const Quat& quat() const { return q_; }
  Mat3 matrix() const { return q_.toRotationMatrix(); }
  Vec3 rotvec() const {
    Eigen::AngleAxisd aa(q_);
    return aa.axis() * aa.angle();
  }

  Rotation inverse() const { return Rotation(q_.conjugate()); }
  Rotation operator*(const Rotation& o) const { return Rotation(q_ * o.q_); }
  Vec3 operator*(const Vec3& v) const { return q_ * v; }

  /// Hemisphere-canonical coefficients (w >= 0), for serialization only.
  Eigen::Vector4d canonical_coeffs() const {
    Eigen::Vector4d c(q_.w(), q_.x(), q_.y(), q_.z());
    if (c[0] < 0.0) c = -c;
    return c;
  }

  bool approx_equal(const Rotation& o, double tol = 1e-9) const;

 private:
  Quat q_;
};

/// Geodesic distance between two rotations, in [0, pi].
double angular_distance(const Rotation& a, const Rotation& b);

/// Weighted chordal mean of unit quaternions: dominant eigenvector of the
/// weighted outer-product sum. Sign-invariant in every sample.
Rotation average_rotations(std::span<const Rotation> samples, std::span<const double> weights = {});

/// Weighted arithmetic mean.
Vec3 average_translations(std::span<const Vec3> samples, std::span<const double> weights = {});

/// Rigid transform: x_world = rotation * x_local + translation.
struct Pose {
  Rotation rotation;
  Vec3 translation = Vec3::Zero();

  Pose() = default;
  Pose(const Rotation& r, const Vec3& t) : rotation(r), translation(t) {}

  static Pose identity() { return Pose(); }

  Pose operator*(const Pose& o) const {
    return Pose(rotation * o.rotation, rotation * o.translation + translation);
  }
  Vec3 operator*(const Vec3& p) const { return rotation * p + translation; }

  Pose inverse() const {
    const Rotation ri = rotation.inverse();
    return Pose(ri, -(ri * translation));
  }

  Eigen::Matrix4d matrix() const {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m.topLeftCorner<3, 3>() = rotation.matrix();
    m.topRightCorner<3, 1>() = translation;
    return m;
  }

  /// Wire format: [qw, qx, qy, qz, tx, ty, tz], hemisphere-canonical quaternion.
  std::array<double, 7> serialize() const {
    const Eigen::Vector4d c = rotation.canonical_coeffs();
    return {c[0], c[1], c[2], c[3], translation.x(), translation.y(), translation.z()};
  }
  static Pose deserialize(std::span<const double> v) {
    if (v.size() != 7) throw std::invalid_argument("pose record must hold 7 values");
    return Pose(Rotation(v[0], v[1], v[2], v[3]), Vec3(v[4], v[5], v[6]));
  }

  bool approx_equal(const Pose& o, double rot_tol = 1e-9, double trans_tol = 1e-9) const {
    return rotation.approx_equal(o.rotation, rot_tol) &&
           (translation - o.translation).norm() <= trans_tol;
  }
};

}  // namespace binpick
