#pragma once

#include "binpick/symmetry.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <unordered_map>

namespace binpick {

struct BufferConfig {
  double theta_thresh = 15.0 * M_PI / 180.0;  // radians
  double delta_thresh = 0.010;                // meters
  int min_observations = 2;
  int stale_after = 2;  // unseen in-frustum iterations before removal
  bool confidence_weighting = false;

  void validate() const {
    if (theta_thresh <= 0 || delta_thresh <= 0)
      throw std::invalid_argument("buffer thresholds must be > 0");
    if (min_observations < 1) throw std::invalid_argument("min_observations must be >= 1");
  }
};

/// A pose estimate already lifted to the world frame and past the rejection
/// filter.
struct WorldEstimate {
  int class_id = -1;
  Pose pose;
  double confidence = 1.0;
  int truth_id = -1;  // simulator label, carried through for evaluation
};

struct TrackedObject {
  int id = -1;
  int class_id = -1;
  std::vector<Pose> history;  // symmetry-canonicalized world poses
  std::vector<double> confidences;
  Pose fused;
  int last_seen = -1;
  int unseen_streak = 0;
  int truth_id = -1;

  int count() const { return int(history.size()); }
  double confidence() const;
};

struct ValidatedPose {
  int track_id;
  int class_id;
  Pose pose;
  double confidence;
  int truth_id;
};

/// Temporal multi-view fusion buffer. Single logical owner, mutated once
/// per iteration; readers take value snapshots.
class PoseBuffer {
 public:
  explicit PoseBuffer(BufferConfig config = {});

  void register_class(int class_id, SymmetryGroup group);
  const SymmetryGroup& group_for(int class_id) const;

  const std::vector<TrackedObject>& tracks() const { return tracks_; }
  const BufferConfig& config() const { return config_; }

  /// Best matching track under the distance thresholds, if any.
  std::optional<int> associate(const WorldEstimate& estimate) const;

  /// Absorbs one iteration of estimates: greedy nearest-first assignment,
  /// at most one estimate per track, the rest open new tracks.
  void ingest(std::span<const WorldEstimate> estimates, int iteration);

  /// Removes tracks that stayed unseen for `stale_after` consecutive
  /// iterations in which they should have been visible. Idempotent per
  /// iteration.
  void invalidate(int iteration, const std::function<bool(const TrackedObject&)>& visible);

  std::vector<ValidatedPose> validated_poses(int iteration) const;

  /// Drops a track by id (used after a confirmed extraction).
  void remove_track(int track_id);

  /// JSON-lines ingest log (track id, raw/canonicalized/fused pose per record).
  void set_log(std::ostream* log) { log_ = log; }

 private:
  void refuse(TrackedObject& track) const;  // recompute fused pose
  void log_record(int track_id, const Pose& raw, const Pose& canonical, const Pose& fused,
                  int iteration) const;

  BufferConfig config_;
  std::vector<TrackedObject> tracks_;
  std::unordered_map<int, SymmetryGroup> groups_;
  int next_id_ = 0;
  int last_invalidated_ = -1;
  std::ostream* log_ = nullptr;
};

}  // namespace binpick
