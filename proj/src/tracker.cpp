#include "shiptrack/tracker.hpp"

#include <algorithm>
#include <stdexcept>

namespace shiptrack {

namespace {

constexpr double kUnmatchable = -1e9;

bool state_degenerate(const KalmanTrackState& s) {
  return !(s.mean(2) > 0.0) || !(s.mean(3) > 0.0);
}

}  // namespace

Tracker::Tracker(TrackerConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.low_conf_floor > cfg_.high_conf_threshold) {
    throw std::invalid_argument("tracker config: low_conf_floor > high_conf_threshold");
  }
  if (cfg_.max_age < 1 || cfg_.min_hits < 1) {
    throw std::invalid_argument("tracker config: max_age and min_hits must be >= 1");
  }
}

int Tracker::spawn(const Detection& det) {
  Slot slot;
  const int id = next_id_++;
  slot.track.id = id;
  slot.track.state = initiate(det.bbox, cfg_.noise);
  slot.track.status = cfg_.min_hits <= 1 ? TrackStatus::Confirmed : TrackStatus::Tentative;
  slot.track.hits = 1;
  slot.track.age = 0;
  slot.track.time_since_update = 0;
  slot.track.class_id = det.class_id;
  slot.track.last_confidence = det.confidence;
  slot.matched = det;
  live_.push_back(std::move(slot));
  return id;
}

void Tracker::associate_stage(std::vector<int>& track_idx, std::vector<Detection>& dets,
                              double gate) {
  if (track_idx.empty() || dets.empty()) return;

  std::vector<Track> stage_tracks;
  std::vector<BBox> preds;
  stage_tracks.reserve(track_idx.size());
  preds.reserve(track_idx.size());
  for (int idx : track_idx) {
    stage_tracks.push_back(live_[idx].track);
    preds.push_back(to_bbox(live_[idx].track.state));
  }
  std::vector<BBox> det_boxes;
  det_boxes.reserve(dets.size());
  for (const auto& d : dets) det_boxes.push_back(d.bbox);

  Eigen::MatrixXd sim = similarity_matrix(preds, det_boxes, cfg_.metric);
  if (cfg_.per_class) {
    for (int i = 0; i < sim.rows(); ++i) {
      for (int j = 0; j < sim.cols(); ++j) {
        if (stage_tracks[i].class_id != dets[j].class_id) sim(i, j) = kUnmatchable;
      }
    }
  }
  if (cfg_.cost_hook) {
    sim += cfg_.cost_hook(stage_tracks, dets);
  }

  const AssignmentResult result = solve_assignment(sim, gate, cfg_.gating);
  for (const auto& [ti, dj] : result.matches) {
    live_[track_idx[ti]].matched = dets[dj];
  }

  std::vector<int> leftover_tracks;
  for (int ti : result.unmatched_tracks) leftover_tracks.push_back(track_idx[ti]);
  std::vector<Detection> leftover_dets;
  for (int dj : result.unmatched_detections) leftover_dets.push_back(dets[dj]);
  track_idx = std::move(leftover_tracks);
  dets = std::move(leftover_dets);
}

FrameResult Tracker::step(int frame_index, const std::vector<Detection>& dets) {
  if (flushed_) throw std::logic_error("tracker: step after flush");
  if (frame_index <= last_frame_) {
    throw std::invalid_argument("tracker: frame_index must strictly increase");
  }
  last_frame_ = frame_index;

  for (const auto& d : dets) {
    if (!(d.confidence >= 0.0 && d.confidence <= 1.0)) {
      throw std::invalid_argument("tracker: detection confidence outside [0,1]");
    }
  }

  // Predict every live track one frame forward.
  std::vector<int> live_idx;
  for (size_t i = 0; i < live_.size(); ++i) {
    auto& slot = live_[i];
    slot.matched.reset();
    slot.track.state = predict(slot.track.state, cfg_.noise);
    slot.track.age += 1;
    slot.track.time_since_update += 1;
    if (state_degenerate(slot.track.state)) {
      // collapsed height or aspect: the track can no longer produce a box
      slot.track.status = TrackStatus::Removed;
      continue;
    }
    live_idx.push_back(static_cast<int>(i));
  }

  // Association. Sort runs one stage over everything above the floor; Byte
  // runs high-confidence detections first, then offers the low-confidence
  // remainder to the tracks the first stage left unmatched.
  std::vector<Detection> spawn_pool;
  if (cfg_.pipeline == Pipeline::Sort) {
    std::vector<Detection> stage;
    for (const auto& d : dets) {
      if (d.confidence >= cfg_.low_conf_floor) stage.push_back(d);
    }
    associate_stage(live_idx, stage, cfg_.gate);
    spawn_pool = std::move(stage);
  } else {
    std::vector<Detection> high, low;
    for (const auto& d : dets) {
      if (d.confidence >= cfg_.high_conf_threshold) {
        high.push_back(d);
      } else if (d.confidence >= cfg_.low_conf_floor) {
        low.push_back(d);
      }
    }
    associate_stage(live_idx, high, cfg_.gate);
    associate_stage(live_idx, low, cfg_.stage_two_gate.value_or(cfg_.gate));
    spawn_pool = std::move(high);  // low-score leftovers never start tracks
  }

  // Matched tracks take the Kalman correction; unmatched ones age out.
  for (auto& slot : live_) {
    if (slot.track.status == TrackStatus::Removed) continue;
    if (slot.matched) {
      slot.track.state = update(slot.track.state, slot.matched->bbox, cfg_.noise);
      slot.track.hits += 1;
      slot.track.time_since_update = 0;
      slot.track.last_confidence = slot.matched->confidence;
      if (slot.track.status == TrackStatus::Lost) {
        slot.track.status = TrackStatus::Confirmed;
      } else if (slot.track.status == TrackStatus::Tentative &&
                 slot.track.hits >= cfg_.min_hits) {
        slot.track.status = TrackStatus::Confirmed;
      }
    } else {
      if (slot.track.status == TrackStatus::Tentative) {
        slot.track.status = TrackStatus::Removed;
      } else {
        if (slot.track.status == TrackStatus::Confirmed && slot.track.time_since_update > 1) {
          slot.track.status = TrackStatus::Lost;
        }
        if (slot.track.time_since_update > cfg_.max_age) {
          slot.track.status = TrackStatus::Removed;
        }
      }
    }
  }

  for (const auto& d : spawn_pool) {
    if (d.confidence >= cfg_.high_conf_threshold) spawn(d);
  }

  FrameResult result;
  result.frame_index = frame_index;
  for (const auto& slot : live_) {
    if (slot.track.status != TrackStatus::Confirmed) continue;
    if (slot.matched) {
      const BBox box = cfg_.output_box == OutputBoxPolicy::Detection ? slot.matched->bbox
                                                                     : to_bbox(slot.track.state);
      result.outputs.push_back({slot.track.id, box, slot.track.last_confidence});
    } else if (cfg_.emit_coasting && slot.track.time_since_update <= 1) {
      // Coasting: report the predicted box for a single missed frame.
      result.outputs.push_back(
          {slot.track.id, to_bbox(slot.track.state), slot.track.last_confidence});
    }
  }

  // Archive removed tracks; live_ keeps creation (id) order.
  std::erase_if(live_, [this](Slot& slot) {
    if (slot.track.status == TrackStatus::Removed) {
      removed_.push_back(slot.track);
      return true;
    }
    return false;
  });

  return result;
}

std::vector<Track> Tracker::flush() {
  if (flushed_) throw std::logic_error("tracker: flush called twice");
  flushed_ = true;
  std::vector<Track> all = std::move(removed_);
  for (auto& slot : live_) all.push_back(slot.track);
  std::sort(all.begin(), all.end(), [](const Track& a, const Track& b) { return a.id < b.id; });
  live_.clear();
  removed_.clear();
  return all;
}

}  // namespace shiptrack
