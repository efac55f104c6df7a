#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "shiptrack/assignment.hpp"
#include "shiptrack/bbox.hpp"
#include "shiptrack/kalman.hpp"

namespace shiptrack {

struct Detection {
  BBox bbox;
  double confidence = 1.0;
  int class_id = -1;
};

enum class TrackStatus { Tentative, Confirmed, Lost, Removed };

enum class Pipeline { Sort, Byte };

struct Track {
  int id = 0;
  KalmanTrackState state;
  TrackStatus status = TrackStatus::Tentative;
  int hits = 0;               // successful updates, spawn included
  int age = 0;                // frames since creation
  int time_since_update = 0;  // frames since last matched detection
  int class_id = -1;
  double last_confidence = 0.0;
};

/// Optional externally supplied additive term for the association matrix,
/// e.g. an appearance cost. Called with the live tracks (association order)
/// and the detections of the current stage; must return a matrix of the
/// same shape as the geometric similarity matrix.
using AssociationCostHook =
    std::function<Eigen::MatrixXd(const std::vector<Track>&, const std::vector<Detection>&)>;

/// Box reported for a matched track: the Kalman posterior (default) or the
/// raw matched detection. Detection output suits shake-heavy scenes where
/// the posterior lags the measurement.
enum class OutputBoxPolicy { Posterior, Detection };

struct TrackerConfig {
  Pipeline pipeline = Pipeline::Sort;
  SimilarityMetric metric = SimilarityMetric::IoU;
  double gate = 0.1;
  std::optional<double> stage_two_gate;  // Byte second stage; defaults to `gate`
  double high_conf_threshold = 0.6;
  double low_conf_floor = 0.1;
  int max_age = 30;
  int min_hits = 3;
  NoiseConfig noise;
  GatingMode gating = GatingMode::PostSolve;
  bool per_class = false;       // when set, cross-class pairs are unmatchable
  bool emit_coasting = true;    // report a predicted box for one missed frame
  OutputBoxPolicy output_box = OutputBoxPolicy::Posterior;
  AssociationCostHook cost_hook;
};

struct TrackOutput {
  int track_id;
  BBox bbox;
  double confidence;
};

struct FrameResult {
  int frame_index = 0;
  std::vector<TrackOutput> outputs;
};

/// Frame-stepped track lifecycle around a single-stage (Sort) or two-stage
/// high/low-confidence (Byte) association. One instance per video sequence;
/// not safe for concurrent use, distinct sequences track independently.
class Tracker {
 public:
  explicit Tracker(TrackerConfig cfg);

  /// Advances one frame: predicts every live track, associates detections,
  /// updates matches, spawns tracks from unmatched high-confidence
  /// detections, and ages out stale tracks. frame_index must strictly
  /// increase across calls.
  FrameResult step(int frame_index, const std::vector<Detection>& dets);

  /// All tracks ever created, Removed included. The tracker is unusable
  /// afterward.
  std::vector<Track> flush();

  const TrackerConfig& config() const { return cfg_; }

 private:
  struct Slot {
    Track track;
    std::optional<Detection> matched;  // detection assigned this frame
  };

  void associate_stage(std::vector<int>& track_idx, std::vector<Detection>& dets, double gate);
  int spawn(const Detection& det);

  TrackerConfig cfg_;
  std::vector<Slot> live_;
  std::vector<Track> removed_;
  int next_id_ = 1;
  int last_frame_ = 0;
  bool flushed_ = false;
};

}  // namespace shiptrack
