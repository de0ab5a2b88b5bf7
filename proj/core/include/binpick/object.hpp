#pragma once

#include "binpick/mesh.hpp"
#include "binpick/symmetry.hpp"

#include <memory>
#include <string>

namespace binpick {

/// Immutable object class description shared across the pipeline. Cheap to
/// copy; the mesh and its BVH are reference-counted.
class ObjectModel {
 public:
  ObjectModel() = default;
  ObjectModel(int class_id, std::string name, TriangleMesh mesh,
              SymmetryGroup symmetry = SymmetryGroup::trivial(),
              std::vector<Rotation> stable_orientations = {Rotation::identity()})
      : class_id_(class_id),
        name_(std::move(name)),
        mesh_(std::make_shared<TriangleMesh>(std::move(mesh))),
        symmetry_(std::move(symmetry)),
        stable_orientations_(std::move(stable_orientations)) {
    symmetry_.validate();
    bvh_ = std::make_shared<Bvh>(*mesh_);
    center_ = mesh_->centroid();
  }

  int class_id() const { return class_id_; }
  const std::string& name() const { return name_; }
  const TriangleMesh& mesh() const { return *mesh_; }
  const Bvh& bvh() const { return *bvh_; }
  const SymmetryGroup& symmetry() const { return symmetry_; }
  const Vec3& center() const { return center_; }
  const std::vector<Rotation>& stable_orientations() const { return stable_orientations_; }
  bool valid() const { return mesh_ != nullptr; }

 private:
  int class_id_ = -1;
  std::string name_;
  std::shared_ptr<const TriangleMesh> mesh_;
  std::shared_ptr<const Bvh> bvh_;
  SymmetryGroup symmetry_;
  Vec3 center_ = Vec3::Zero();
  std::vector<Rotation> stable_orientations_;
};

}  // namespace binpick
