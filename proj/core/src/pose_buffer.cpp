#include "binpick/pose_buffer.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <numeric>
#include <ostream>

namespace binpick {

double TrackedObject::confidence() const {
  if (confidences.empty()) return 0.0;
  return std::accumulate(confidences.begin(), confidences.end(), 0.0) / double(confidences.size());
}

PoseBuffer::PoseBuffer(BufferConfig config) : config_(config) { config_.validate(); }

void PoseBuffer::register_class(int class_id, SymmetryGroup group) {
  group.validate();
  groups_[class_id] = std::move(group);
}

const SymmetryGroup& PoseBuffer::group_for(int class_id) const {
  static const SymmetryGroup trivial = SymmetryGroup::trivial();
  const auto it = groups_.find(class_id);
  return it == groups_.end() ? trivial : it->second;
}

std::optional<int> PoseBuffer::associate(const WorldEstimate& e) const {
  const SymmetryGroup& group = group_for(e.class_id);
  std::optional<int> best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (const auto& track : tracks_) {
    if (track.class_id != e.class_id) continue;
    const double dt = (e.pose.translation - track.fused.translation).norm();
    if (dt >= config_.delta_thresh || dt >= best_dist) continue;
    const Rotation canon = canonicalize_rotation(e.pose.rotation, track.fused.rotation, group);
    if (angular_distance(canon, track.fused.rotation) >= config_.theta_thresh) continue;
    best = track.id;
    best_dist = dt;
  }
  return best;
}

void PoseBuffer::refuse(TrackedObject& track) const {
  std::vector<Rotation> rots;
  std::vector<Vec3> trans;
  rots.reserve(track.history.size());
  trans.reserve(track.history.size());
  for (const auto& p : track.history) {
    rots.push_back(p.rotation);
    trans.push_back(p.translation);
  }
  std::span<const double> w;
  if (config_.confidence_weighting) w = track.confidences;
  track.fused = Pose(average_rotations(rots, w), average_translations(trans, w));
}

void PoseBuffer::ingest(std::span<const WorldEstimate> estimates, int iteration) {
  // candidate (estimate, track) pairs within both thresholds
  struct Cand {
    size_t est;
    size_t track;
    double dist;
  };
  std::vector<Cand> cands;
  for (size_t ei = 0; ei < estimates.size(); ++ei) {
    const auto& e = estimates[ei];
    const SymmetryGroup& group = group_for(e.class_id);
    for (size_t ti = 0; ti < tracks_.size(); ++ti) {
      const auto& track = tracks_[ti];
      if (track.class_id != e.class_id) continue;
      const double dt = (e.pose.translation - track.fused.translation).norm();
      if (dt >= config_.delta_thresh) continue;
      const Rotation canon = canonicalize_rotation(e.pose.rotation, track.fused.rotation, group);
      if (angular_distance(canon, track.fused.rotation) >= config_.theta_thresh) continue;
      cands.push_back({ei, ti, dt});
    }
  }
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Cand& a, const Cand& b) { return a.dist < b.dist; });

  std::vector<bool> est_used(estimates.size(), false);
  std::vector<bool> track_used(tracks_.size(), false);  // one estimate per track per iteration
  for (const auto& c : cands) {
    if (est_used[c.est] || track_used[c.track]) continue;
    est_used[c.est] = true;
    track_used[c.track] = true;
    auto& track = tracks_[c.track];
    const auto& e = estimates[c.est];
    const Pose canon = canonicalize(e.pose, track.fused, group_for(e.class_id));
    track.history.push_back(canon);
    track.confidences.push_back(e.confidence);
    track.last_seen = iteration;
    track.unseen_streak = 0;
    refuse(track);
    log_record(track.id, e.pose, canon, track.fused, iteration);
  }

  for (size_t ei = 0; ei < estimates.size(); ++ei) {
    if (est_used[ei]) continue;
    const auto& e = estimates[ei];
    TrackedObject track;
    track.id = next_id_++;
    track.class_id = e.class_id;
    track.truth_id = e.truth_id;
    // Canonicalize against identity so symmetry-equivalent first
    // observations open identical tracks.
    const Pose canon = canonicalize(e.pose, Pose::identity(), group_for(e.class_id));
    track.history.push_back(canon);
    track.confidences.push_back(e.confidence);
    track.fused = canon;
    track.last_seen = iteration;
    log_record(track.id, e.pose, canon, track.fused, iteration);
    tracks_.push_back(std::move(track));
  }
}

void PoseBuffer::invalidate(int iteration,
                            const std::function<bool(const TrackedObject&)>& visible) {
  if (iteration <= last_invalidated_) return;
  last_invalidated_ = iteration;
  std::vector<TrackedObject> kept;
  kept.reserve(tracks_.size());
  for (auto& track : tracks_) {
    if (track.last_seen == iteration) {
      kept.push_back(std::move(track));
      continue;
    }
    if (visible(track)) {
      ++track.unseen_streak;
      if (track.unseen_streak >= config_.stale_after) continue;  // drop
    }
    kept.push_back(std::move(track));
  }
  tracks_ = std::move(kept);
}

std::vector<ValidatedPose> PoseBuffer::validated_poses(int iteration) const {
  std::vector<ValidatedPose> out;
  for (const auto& track : tracks_) {
    if (track.last_seen != iteration || track.count() < config_.min_observations) continue;
    out.push_back({track.id, track.class_id, track.fused, track.confidence(), track.truth_id});
  }
  return out;
}

void PoseBuffer::remove_track(int track_id) {
  std::erase_if(tracks_, [&](const TrackedObject& t) { return t.id == track_id; });
}

void PoseBuffer::log_record(int track_id, const Pose& raw, const Pose& canonical,
                            const Pose& fused, int iteration) const {
  if (!log_) return;
  nlohmann::ordered_json rec;
  rec["iteration"] = iteration;
  rec["track"] = track_id;
  rec["raw"] = raw.serialize();
  rec["canonical"] = canonical.serialize();
  rec["fused"] = fused.serialize();
  *log_ << rec.dump() << '\n';
}

}  // namespace binpick
