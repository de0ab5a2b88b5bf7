#include "binpick/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace binpick {

bool Rotation::approx_equal(const Rotation& o, double tol) const {
  return angular_distance(*this, o) <= tol;
}

double angular_distance(const Rotation& a, const Rotation& b) {
  // For unit quaternions, min(|qa - qb|, |qa + qb|) = 2 sin(theta / 4); the
  // asin form keeps full precision near zero where acos of the dot does not.
  const Eigen::Vector4d va = a.quat().coeffs(), vb = b.quat().coeffs();
  const double chord = std::min((va - vb).norm(), (va + vb).norm());
  return 4.0 * std::asin(std::min(1.0, 0.5 * chord));
}

Rotation average_rotations(std::span<const Rotation> samples, std::span<const double> weights) {
  if (samples.empty()) throw EmptyInput("average_rotations: no samples");
  if (!weights.empty() && weights.size() != samples.size())
    throw std::invalid_argument("average_rotations: weight count mismatch");

  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  double wsum = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    const Quat& q = samples[i].quat();
    const Eigen::Vector4d v(q.w(), q.x(), q.y(), q.z());
    m += w * v * v.transpose();
    wsum += w;
  }
  if (wsum <= 0.0) throw std::invalid_argument("average_rotations: weights sum to zero");

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(m);
  const Eigen::Vector4d v = es.eigenvectors().col(3);  // largest eigenvalue
  return Rotation(v[0], v[1], v[2], v[3]);
}

Vec3 average_translations(std::span<const Vec3> samples, std::span<const double> weights) {
  if (samples.empty()) throw EmptyInput("average_translations: no samples");
  if (!weights.empty() && weights.size() != samples.size())
    throw std::invalid_argument("average_translations: weight count mismatch");
  Vec3 acc = Vec3::Zero();
  double wsum = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    acc += w * samples[i];
    wsum += w;
  }
  if (wsum <= 0.0) throw std::invalid_argument("average_translations: weights sum to zero");
  return acc / wsum;
}

}  // namespace binpick
